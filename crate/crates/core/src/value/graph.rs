//! Mutable value graphs built incrementally by a host, before validation.
//!
//! Nodes are reference-counted, so a host can share a sub-value between
//! parents or accidentally make a record contain itself. [`validate_value`]
//! turns a graph into a [`ValueRecord`] or reports where it breaks the value
//! invariants.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

use super::{push_key, Number, Value, ValueRecord};
use crate::error::ValidationError;

pub type NodeRef = Rc<RefCell<Node>>;

#[derive(Debug)]
pub enum Node {
    Null,
    Bool(bool),
    Number(f64),
    Text(String),
    List(Vec<NodeRef>),
    /// Entries in insertion order; duplicates are a validation error.
    Record(Vec<(String, NodeRef)>),
}

impl Node {
    pub fn into_ref(self) -> NodeRef {
        Rc::new(RefCell::new(self))
    }
}

/// Converts a candidate graph into a validated record.
pub fn validate_value(root: &NodeRef) -> Result<ValueRecord, ValidationError> {
    let mut ancestors = Vec::new();
    let value = convert(root, &mut String::new(), &mut ancestors)?;
    ValueRecord::from_value(value)
}

fn convert(
    node: &NodeRef,
    path: &mut String,
    ancestors: &mut Vec<*const RefCell<Node>>,
) -> Result<Value, ValidationError> {
    let id = Rc::as_ptr(node);
    if ancestors.contains(&id) {
        return Err(ValidationError::Cycle { path: path.clone() });
    }
    ancestors.push(id);
    let value = match &*node.borrow() {
        Node::Null => Value::Null,
        Node::Bool(b) => Value::Bool(*b),
        Node::Number(n) => Number::new(*n)
            .map(Value::Number)
            .ok_or_else(|| ValidationError::NonFinite { path: path.clone() })?,
        Node::Text(s) => Value::Text(s.clone()),
        Node::List(items) => {
            let mut out = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                let len = path.len();
                path.push_str(&format!("[{i}]"));
                out.push(convert(item, path, ancestors)?);
                path.truncate(len);
            }
            Value::List(out)
        }
        Node::Record(entries) => {
            let mut out = BTreeMap::new();
            for (key, item) in entries {
                if key.is_empty() {
                    return Err(ValidationError::EmptyKey { path: path.clone() });
                }
                let len = path.len();
                push_key(path, key);
                if out.contains_key(key) {
                    return Err(ValidationError::DuplicateKey { path: path.clone() });
                }
                let converted = convert(item, path, ancestors)?;
                out.insert(key.clone(), converted);
                path.truncate(len);
            }
            Value::Record(out.into_iter().collect())
        }
    };
    ancestors.pop();
    Ok(value)
}
