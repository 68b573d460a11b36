//! JSON-model values used for beliefs, environment state and actions.
//!
//! Records keep their keys in a `BTreeMap`, so iteration and serialization
//! order is always lexicographic and canonical output is byte-stable.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::ops::Index;

use serde::de::{self, Deserializer, MapAccess, SeqAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{ParseError, ValidationError};

pub mod graph;

/// Largest magnitude below which integral numbers are written without a
/// fractional part.
const MAX_SAFE_INTEGER: f64 = 9_007_199_254_740_992.0;

static NULL: Value = Value::Null;

/// A finite double-precision number.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Number(f64);

impl Number {
    pub fn new(n: f64) -> Option<Self> {
        n.is_finite().then_some(Number(n))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// The number as an integer, if it has no fractional part and fits.
    pub fn as_i64(self) -> Option<i64> {
        (self.0.fract() == 0.0 && self.0.abs() < MAX_SAFE_INTEGER).then_some(self.0 as i64)
    }
}

impl Eq for Number {}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_i64() {
            Some(i) => write!(f, "{i}"),
            None => write!(f, "{}", self.0),
        }
    }
}

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.as_i64() {
            Some(i) => serializer.serialize_i64(i),
            None => serializer.serialize_f64(self.0),
        }
    }
}

impl<'de> Deserialize<'de> for Number {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let n = f64::deserialize(deserializer)?;
        Number::new(n).ok_or_else(|| de::Error::custom("non-finite number"))
    }
}

macro_rules! number_from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Number {
            fn from(n: $t) -> Self {
                Number(n as f64)
            }
        }
        impl From<$t> for Value {
            fn from(n: $t) -> Self {
                Value::Number(Number(n as f64))
            }
        }
    )*};
}

number_from_int!(i8, i16, i32, i64, u8, u16, u32, u64, usize);

/// A tree value in the JSON data model.
///
/// Equality is structural: record key order never matters, list order
/// always does.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Value {
    #[default]
    Null,
    Bool(bool),
    Number(Number),
    Text(String),
    List(Vec<Value>),
    Record(ValueRecord),
}

impl Value {
    /// Builds a number value, rejecting NaN and infinities.
    pub fn number(n: f64) -> Result<Value, ValidationError> {
        Number::new(n)
            .map(Value::Number)
            .ok_or_else(|| ValidationError::NonFinite { path: String::new() })
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(n) => Some(n.get()),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Value::Number(n) => n.as_i64(),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Value]> {
        match self {
            Value::List(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_record(&self) -> Option<&ValueRecord> {
        match self {
            Value::Record(r) => Some(r),
            _ => None,
        }
    }

    /// Looks up `key` if this value is a record.
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.as_record().and_then(|r| r.get(key))
    }

    /// Resolves a JSON pointer such as `/door/locked` or `/requests/0`.
    pub fn pointer(&self, pointer: &str) -> Option<&Value> {
        if pointer.is_empty() {
            return Some(self);
        }
        let rest = pointer.strip_prefix('/')?;
        rest.split('/').try_fold(self, |node, token| {
            let token = token.replace("~1", "/").replace("~0", "~");
            match node {
                Value::Record(r) => r.get(&token),
                Value::List(items) => token.parse::<usize>().ok().and_then(|i| items.get(i)),
                _ => None,
            }
        })
    }

    /// Checks every value invariant: finite numbers and non-empty record keys.
    pub fn validate(&self) -> Result<(), ValidationError> {
        validate_at(self, &mut Vec::new())
    }

    /// Canonical JSON: UTF-8, lexicographic keys, no insignificant whitespace.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("values always serialize")
    }

    pub fn from_json_str(text: &str) -> Result<Value, ParseError> {
        serde_json::from_str(text).map_err(ParseError::from)
    }
}

enum Segment<'a> {
    Key(&'a str),
    Index(usize),
}

fn render_path(segments: &[Segment<'_>]) -> String {
    let mut path = String::new();
    for segment in segments {
        match segment {
            Segment::Key(key) => push_key(&mut path, key),
            Segment::Index(i) => {
                let _ = write!(path, "[{i}]");
            }
        }
    }
    path
}

// Paths are only rendered once a violation is found.
fn validate_at<'a>(value: &'a Value, path: &mut Vec<Segment<'a>>) -> Result<(), ValidationError> {
    match value {
        Value::Number(n) if !n.get().is_finite() => Err(ValidationError::NonFinite {
            path: render_path(path),
        }),
        Value::List(items) => {
            for (i, item) in items.iter().enumerate() {
                path.push(Segment::Index(i));
                validate_at(item, path)?;
                path.pop();
            }
            Ok(())
        }
        Value::Record(record) => validate_record(record, path),
        _ => Ok(()),
    }
}

fn validate_record<'a>(record: &'a ValueRecord, path: &mut Vec<Segment<'a>>) -> Result<(), ValidationError> {
    for (key, item) in record.iter() {
        if key.is_empty() {
            return Err(ValidationError::EmptyKey {
                path: render_path(path),
            });
        }
        path.push(Segment::Key(key));
        validate_at(item, path)?;
        path.pop();
    }
    Ok(())
}

pub(crate) fn push_key(path: &mut String, key: &str) {
    if !path.is_empty() {
        path.push('.');
    }
    path.push_str(key);
}

impl Index<&str> for Value {
    type Output = Value;

    /// Missing keys and non-records index to `Null`.
    fn index(&self, key: &str) -> &Value {
        self.get(key).unwrap_or(&NULL)
    }
}

impl Index<usize> for Value {
    type Output = Value;

    fn index(&self, index: usize) -> &Value {
        self.as_list().and_then(|l| l.get(index)).unwrap_or(&NULL)
    }
}

impl PartialEq<bool> for Value {
    fn eq(&self, other: &bool) -> bool {
        self.as_bool() == Some(*other)
    }
}

impl PartialEq<&str> for Value {
    fn eq(&self, other: &&str) -> bool {
        self.as_str() == Some(*other)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_owned())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<Number> for Value {
    fn from(n: Number) -> Self {
        Value::Number(n)
    }
}

impl From<ValueRecord> for Value {
    fn from(r: ValueRecord) -> Self {
        Value::Record(r)
    }
}

impl<T: Into<Value>> From<Vec<T>> for Value {
    fn from(items: Vec<T>) -> Self {
        Value::List(items.into_iter().map(Into::into).collect())
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Null, Into::into)
    }
}

impl TryFrom<serde_json::Value> for Value {
    type Error = ValidationError;

    fn try_from(json: serde_json::Value) -> Result<Self, Self::Error> {
        let value = match json {
            serde_json::Value::Null => Value::Null,
            serde_json::Value::Bool(b) => Value::Bool(b),
            serde_json::Value::Number(n) => {
                let f = n.as_f64().unwrap_or(f64::NAN);
                Value::number(f)?
            }
            serde_json::Value::String(s) => Value::Text(s),
            serde_json::Value::Array(items) => {
                Value::List(items.into_iter().map(Value::try_from).collect::<Result<_, _>>()?)
            }
            serde_json::Value::Object(map) => {
                let mut record = ValueRecord::new();
                for (k, v) in map {
                    record.insert(k, Value::try_from(v)?);
                }
                Value::Record(record)
            }
        };
        value.validate()?;
        Ok(value)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_json())
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Null => serializer.serialize_unit(),
            Value::Bool(b) => serializer.serialize_bool(*b),
            Value::Number(n) => n.serialize(serializer),
            Value::Text(s) => serializer.serialize_str(s),
            Value::List(items) => {
                let mut seq = serializer.serialize_seq(Some(items.len()))?;
                for item in items {
                    seq.serialize_element(item)?;
                }
                seq.end()
            }
            Value::Record(record) => record.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(ValueVisitor)
    }
}

struct ValueVisitor;

impl<'de> Visitor<'de> for ValueVisitor {
    type Value = Value;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a JSON value")
    }

    fn visit_unit<E>(self) -> Result<Value, E> {
        Ok(Value::Null)
    }

    fn visit_none<E>(self) -> Result<Value, E> {
        Ok(Value::Null)
    }

    fn visit_bool<E>(self, b: bool) -> Result<Value, E> {
        Ok(Value::Bool(b))
    }

    fn visit_i64<E>(self, n: i64) -> Result<Value, E> {
        Ok(n.into())
    }

    fn visit_u64<E>(self, n: u64) -> Result<Value, E> {
        Ok(n.into())
    }

    fn visit_f64<E: de::Error>(self, n: f64) -> Result<Value, E> {
        Number::new(n)
            .map(Value::Number)
            .ok_or_else(|| E::custom("non-finite number"))
    }

    fn visit_str<E>(self, s: &str) -> Result<Value, E> {
        Ok(Value::Text(s.to_owned()))
    }

    fn visit_string<E>(self, s: String) -> Result<Value, E> {
        Ok(Value::Text(s))
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Value, A::Error> {
        let mut items = Vec::with_capacity(seq.size_hint().unwrap_or(0));
        while let Some(item) = seq.next_element()? {
            items.push(item);
        }
        Ok(Value::List(items))
    }

    fn visit_map<A: MapAccess<'de>>(self, map: A) -> Result<Value, A::Error> {
        RecordVisitor.visit_map(map).map(Value::Record)
    }
}

/// A record-rooted value: text keys mapped to values.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValueRecord(BTreeMap<String, Value>);

impl ValueRecord {
    pub fn new() -> Self {
        ValueRecord(BTreeMap::new())
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<Value>) -> Option<Value> {
        self.0.insert(key.into(), value.into())
    }

    pub fn remove(&mut self, key: &str) -> Option<Value> {
        self.0.remove(key)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Builder-style insert.
    pub fn with(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.insert(key, value);
        self
    }

    /// Overwrites top-level keys of `self` with those of `update`.
    pub fn merge(&mut self, update: &ValueRecord) {
        for (k, v) in &update.0 {
            self.0.insert(k.clone(), v.clone());
        }
    }

    /// Consuming variant of [`merge`](Self::merge) that avoids cloning `update`.
    pub fn merge_owned(&mut self, update: ValueRecord) {
        self.0.extend(update.0);
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        validate_record(self, &mut Vec::new())
    }

    /// Validates `value` and requires a record at the root.
    pub fn from_value(value: Value) -> Result<ValueRecord, ValidationError> {
        value.validate()?;
        match value {
            Value::Record(r) => Ok(r),
            _ => Err(ValidationError::NotARecord { path: String::new() }),
        }
    }

    pub fn from_json_str(text: &str) -> Result<ValueRecord, ParseError> {
        serde_json::from_str(text).map_err(ParseError::from)
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }
}

/// Right-biased, non-recursive merge: every key of `update` wins, nested
/// records are replaced wholesale.
pub fn shallow_merge(base: &ValueRecord, update: &ValueRecord) -> ValueRecord {
    let mut merged = base.clone();
    merged.merge(update);
    merged
}

/// Structural equality; record key order is irrelevant.
pub fn deep_equal(a: &Value, b: &Value) -> bool {
    a == b
}

impl Index<&str> for ValueRecord {
    type Output = Value;

    fn index(&self, key: &str) -> &Value {
        self.get(key).unwrap_or(&NULL)
    }
}

impl<K: Into<String>, V: Into<Value>> FromIterator<(K, V)> for ValueRecord {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        ValueRecord(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

impl IntoIterator for ValueRecord {
    type Item = (String, Value);
    type IntoIter = std::collections::btree_map::IntoIter<String, Value>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl TryFrom<serde_json::Value> for ValueRecord {
    type Error = ValidationError;

    fn try_from(json: serde_json::Value) -> Result<Self, Self::Error> {
        ValueRecord::from_value(Value::try_from(json)?)
    }
}

impl Serialize for ValueRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ValueRecord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_map(RecordVisitor)
    }
}

struct RecordVisitor;

impl<'de> Visitor<'de> for RecordVisitor {
    type Value = ValueRecord;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a JSON object")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<ValueRecord, A::Error> {
        let mut record = BTreeMap::new();
        while let Some((key, value)) = map.next_entry::<String, Value>()? {
            if key.is_empty() {
                return Err(de::Error::custom("empty record key"));
            }
            if record.insert(key.clone(), value).is_some() {
                return Err(de::Error::custom(format!("duplicate record key `{key}`")));
            }
        }
        Ok(ValueRecord(record))
    }
}
