//! Straight-line reimplementation of the opinion-spread rules, sharing no
//! code with the library. Used to produce and check golden counts.

#![allow(dead_code, clippy::needless_range_loop)]

struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    fn unit(&mut self) -> f64 {
        (self.next() >> 11) as f64 / 9007199254740992.0
    }
}

/// `(volatile, opinion)` for the default 30/20/20/30 society.
pub fn default_society() -> Vec<(bool, bool)> {
    let mut s = Vec::new();
    s.extend(std::iter::repeat_n((true, true), 30));
    s.extend(std::iter::repeat_n((true, false), 20));
    s.extend(std::iter::repeat_n((false, true), 20));
    s.extend(std::iter::repeat_n((false, false), 30));
    s
}

fn draw(opinions: &[bool], volatile: &[bool], bias: f64, rng: &mut SplitMix) -> Vec<[bool; 2]> {
    let n = opinions.len();
    let mut w = vec![0.0; n];
    for j in 0..n {
        let loud = if volatile[j] { 2.0 } else { 1.0 };
        w[j] = if opinions[j] { loud * (1.0 + bias) } else { loud };
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut total = 0.0;
        for j in 0..n {
            if j != i {
                total += w[j];
            }
        }
        let mut pair = [false; 2];
        for slot in 0..2 {
            let r = rng.unit() * total;
            let mut acc = 0.0;
            let mut pick = usize::MAX;
            for j in 0..n {
                if j == i {
                    continue;
                }
                acc += w[j];
                pick = j;
                if r < acc {
                    break;
                }
            }
            pair[slot] = opinions[pick];
        }
        out.push(pair);
    }
    out
}

/// Per-tick `(trueCount, falseCount)`.
pub fn simulate(society: &[(bool, bool)], bias: f64, seed: u64, ticks: u64) -> Vec<(usize, usize)> {
    let n = society.len();
    let volatile: Vec<bool> = society.iter().map(|s| s.0).collect();
    let mut opinions: Vec<bool> = society.iter().map(|s| s.1).collect();
    let mut memory: Vec<Vec<[bool; 2]>> = vec![Vec::new(); n];
    let mut rng = SplitMix(seed);
    let mut inbox = draw(&opinions, &volatile, bias, &mut rng);
    let mut counts = Vec::new();
    for _ in 0..ticks {
        for i in 0..n {
            memory[i].push(inbox[i]);
            let keep = if volatile[i] { 1 } else { 5 };
            while memory[i].len() > keep {
                memory[i].remove(0);
            }
            let mut yes = if opinions[i] { 1 } else { 0 };
            let mut no = 1 - yes;
            for set in &memory[i] {
                for &b in set {
                    if b {
                        yes += 1
                    } else {
                        no += 1
                    }
                }
            }
            if yes > no {
                opinions[i] = true;
            } else if no > yes {
                opinions[i] = false;
            }
        }
        let t = opinions.iter().filter(|&&b| b).count();
        counts.push((t, n - t));
        inbox = draw(&opinions, &volatile, bias, &mut rng);
    }
    counts
}
