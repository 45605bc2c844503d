//! Cyclic sliding-window entropy sums of small joint distributions.
//!
//! For variables `X_1..X_M`, the window of size w starting at j is
//! `X_j, X_{j+1}, …, X_{j+w-1}` (indices mod M). The normalized sums
//! `(1/w) Σ_j H(window_j)` are non-increasing in w.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rational;

/// Largest product alphabet accepted by [`random_pmf`] and the parser.
pub const MAX_OUTCOMES: usize = 10_000;

/// Slack for comparisons between floating-point entropies.
pub const TOLERANCE: f64 = 1e-9;

/// Joint distribution over a product alphabet; probabilities are stored
/// row-major with the last variable varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPMF {
    alphabets: Vec<usize>,
    probs: Vec<f64>,
}

fn outcome_count(alphabets: &[usize]) -> Result<usize> {
    if alphabets.is_empty() || alphabets.contains(&0) {
        return Err(Error::InvalidParams("alphabet sizes must be positive".into()));
    }
    alphabets
        .iter()
        .try_fold(1usize, |acc, &a| acc.checked_mul(a))
        .filter(|&n| n <= MAX_OUTCOMES)
        .ok_or_else(|| Error::InvalidParams(format!("product alphabet exceeds {MAX_OUTCOMES} outcomes")))
}

impl JointPMF {
    pub fn new(alphabets: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let n = outcome_count(&alphabets)?;
        if probs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for {n} outcomes",
                probs.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidParams("probabilities must be finite and nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!("probabilities sum to {total}, not 1")));
        }
        Ok(JointPMF { alphabets, probs })
    }

    /// Independent uniform variables.
    pub fn uniform(alphabets: Vec<usize>) -> Result<Self> {
        let n = outcome_count(&alphabets)?;
        JointPMF::new(alphabets, vec![1.0 / n as f64; n])
    }

    pub fn variables(&self) -> usize {
        self.alphabets.len()
    }

    pub fn alphabets(&self) -> &[usize] {
        &self.alphabets
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn index_of(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.alphabets.len()];
        for (slot, &a) in idx.iter_mut().zip(&self.alphabets).rev() {
            *slot = flat % a;
            flat /= a;
        }
        idx
    }

    /// Entropy in bits of the marginal on `vars`.
    pub fn entropy_of(&self, vars: &[usize]) -> f64 {
        let mut strides = Vec::with_capacity(vars.len());
        let mut size = 1;
        for &v in vars.iter().rev() {
            strides.push(size);
            size *= self.alphabets[v];
        }
        strides.reverse();
        let mut marginal = vec![0.0; size];
        for (flat, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let idx = self.index_of(flat);
            let key: usize = vars.iter().zip(&strides).map(|(&v, &s)| idx[v] * s).sum();
            marginal[key] += p;
        }
        marginal.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
    }

    pub fn joint_entropy(&self) -> f64 {
        let all: Vec<usize> = (0..self.variables()).collect();
        self.entropy_of(&all)
    }

    /// Plain-text table: first non-comment line `alphabets a1 a2 …`, then one
    /// line per outcome `i1 i2 … p` with p a float or `p/q`. Outcomes not
    /// listed have probability zero. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut alphabets: Option<Vec<usize>> = None;
        let mut probs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let Some(sizes) = &alphabets else {
                if fields[0] != "alphabets" || fields.len() < 2 {
                    return Err(err("expected `alphabets <size> …`".into()));
                }
                let sizes = fields[1..]
                    .iter()
                    .map(|f| f.parse::<usize>().map_err(|_| err(format!("bad alphabet size {f:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                let n = outcome_count(&sizes).map_err(|e| err(e.to_string()))?;
                probs = vec![0.0; n];
                alphabets = Some(sizes);
                continue;
            };
            if fields.len() != sizes.len() + 1 {
                return Err(err(format!("expected {} indices and a probability", sizes.len())));
            }
            let mut flat = 0;
            for (f, &a) in fields.iter().zip(sizes) {
                let v: usize = f.parse().map_err(|_| err(format!("bad index {f:?}")))?;
                if v >= a {
                    return Err(err(format!("index {v} out of range for alphabet {a}")));
                }
                flat = flat * a + v;
            }
            let token = fields[sizes.len()];
            let p = if token.contains('/') {
                rational::parse(token).map(|r| rational::to_f64(&r)).map_err(|e| err(e.to_string()))?
            } else {
                token.parse::<f64>().map_err(|_| err(format!("bad probability {token:?}")))?
            };
            probs[flat] += p;
        }
        let alphabets = alphabets.ok_or(Error::Parse {
            line: text.lines().count().max(1),
            msg: "missing `alphabets` header".into(),
        })?;
        JointPMF::new(alphabets, probs)
    }

    /// Inverse of [`JointPMF::parse`], listing nonzero outcomes only.
    pub fn to_text(&self) -> String {
        let sizes: Vec<String> = self.alphabets.iter().map(|a| a.to_string()).collect();
        let mut out = format!("alphabets {}\n", sizes.join(" "));
        for (flat, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                let idx: Vec<String> = self.index_of(flat).iter().map(|v| v.to_string()).collect();
                out.push_str(&format!("{} {p:e}\n", idx.join(" ")));
            }
        }
        out
    }
}

/// `Σ_j H(X_j, …, X_{j+w-1})` over all M cyclic windows.
pub fn window_entropy_sum(p: &JointPMF, w: usize) -> Result<f64> {
    let m = p.variables();
    if w == 0 || w > m {
        return Err(Error::InvalidParams(format!("window {w} outside 1..={m}")));
    }
    Ok((0..m)
        .map(|j| {
            let vars: Vec<usize> = (0..w).map(|t| (j + t) % m).collect();
            p.entropy_of(&vars)
        })
        .sum())
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowCheck {
    pub holds: bool,
    /// `chain[w-1] = window_entropy_sum(p, w) / w` for w = 1..=M.
    pub chain: Vec<f64>,
}

impl fmt::Display for WindowCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.chain.iter().map(|v| format!("{v:.12}")).collect();
        write!(f, "{} [{}]", if self.holds { "holds" } else { "VIOLATED" }, parts.join(", "))
    }
}

pub fn sliding_window_check(p: &JointPMF) -> Result<WindowCheck> {
    let m = p.variables();
    if m < 2 {
        return Err(Error::InvalidParams("need at least two variables".into()));
    }
    let chain = (1..=m)
        .map(|w| window_entropy_sum(p, w).map(|s| s / w as f64))
        .collect::<Result<Vec<_>>>()?;
    let holds = chain.windows(2).all(|c| c[1] <= c[0] + TOLERANCE);
    Ok(WindowCheck { holds, chain })
}

/// Flat Dirichlet draw: normalized `-ln(u)` variates.
pub fn random_pmf(alphabets: &[usize], seed: u64) -> Result<JointPMF> {
    let n = outcome_count(alphabets)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    let mut probs: Vec<f64> = raw.iter().map(|r| r / total).collect();
    // Put the rounding residue on the largest entry so the sum is 1 to
    // within an ulp or two.
    let residue = 1.0 - probs.iter().sum::<f64>();
    let largest = (0..n).max_by(|&a, &b| probs[a].total_cmp(&probs[b])).unwrap_or(0);
    probs[largest] += residue;
    JointPMF::new(alphabets.to_vec(), probs)
}
