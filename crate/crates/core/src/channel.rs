//! The parallel two-user linear deterministic interference channel.
//!
//! Each user owns `M` subcarriers. A subcarrier carries a q-vector of field
//! symbols per time slot (level 0 on top). The direct link shifts the
//! transmitted vector down by `q - n` levels, the cross link by `q - k`.
//! Whether the cross link of a subcarrier is active is fixed for a block and
//! unknown to the transmitters.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{Field, Matrix};
use crate::rational::{self, Rational};

/// Largest subcarrier count for which configurations are enumerated.
pub const MAX_SUBCARRIERS: usize = 20;

/// Full problem instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChannelParams {
    n: usize,
    k: usize,
    subcarriers: usize,
    interfered: usize,
    field: Field,
}

impl ChannelParams {
    /// `n`/`k`: direct/cross strength in levels, `subcarriers`: M,
    /// `interfered`: L, `degree`: extension degree of the symbol field.
    pub fn new(n: usize, k: usize, subcarriers: usize, interfered: usize, degree: u8) -> Result<Self> {
        let field = Field::new(degree)?;
        if n == 0 {
            return Err(Error::InvalidParams("direct strength n must be positive".into()));
        }
        if k > 2 * n {
            return Err(Error::InvalidParams(format!(
                "cross strength k={k} exceeds 2n={}; only 0 <= alpha <= 2 is modelled",
                2 * n
            )));
        }
        if subcarriers == 0 || subcarriers > MAX_SUBCARRIERS {
            return Err(Error::InvalidParams(format!(
                "subcarrier count M must lie in 1..={MAX_SUBCARRIERS}, got {subcarriers}"
            )));
        }
        if interfered == 0 || interfered > subcarriers {
            return Err(Error::InvalidParams(format!(
                "interfered count L must lie in 1..=M={subcarriers}, got {interfered}"
            )));
        }
        Ok(ChannelParams {
            n,
            k,
            subcarriers,
            interfered,
            field,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Levels per subcarrier, max(n, k).
    pub fn q(&self) -> usize {
        self.n.max(self.k)
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn interfered(&self) -> usize {
        self.interfered
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Normalized interference strength k/n.
    pub fn alpha(&self) -> Rational {
        rational::frac(self.k as i128, self.n as i128)
    }

    pub fn with_field(self, degree: u8) -> Result<Self> {
        ChannelParams::new(self.n, self.k, self.subcarriers, self.interfered, degree)
    }

    pub fn with_interfered(self, interfered: usize) -> Result<Self> {
        ChannelParams::new(self.n, self.k, self.subcarriers, interfered, self.field.degree())
    }

    /// `coeff`·n as a level count; rejects negative or fractional results
    /// with the multiplier that would make it integral.
    pub fn levels(&self, coeff: Rational, what: &str) -> Result<usize> {
        let v = coeff * rational::int(self.n as i128);
        if v < Rational::zero() {
            return Err(Error::InvalidParams(format!(
                "{what} is negative at alpha={}",
                rational::format(&self.alpha())
            )));
        }
        if !v.is_integer() {
            return Err(Error::NonIntegral {
                what: what.to_string(),
                n: self.n,
                multiplier: *v.denom() as u64,
            });
        }
        Ok(*v.numer() as usize)
    }

    /// Shift exponent of the direct link.
    pub fn direct_shift(&self) -> usize {
        self.q() - self.n
    }

    /// Shift exponent of the cross link.
    pub fn cross_shift(&self) -> usize {
        self.q() - self.k
    }

    /// Direct map over `slots` time slots, acting on the slot-major stacked
    /// vector (index `t*q + level`).
    pub fn direct_map(&self, slots: usize) -> Matrix {
        Matrix::shift(self.field, self.q(), self.direct_shift()).block_diag(slots)
    }

    pub fn cross_map(&self, slots: usize) -> Matrix {
        Matrix::shift(self.field, self.q(), self.cross_shift()).block_diag(slots)
    }
}

/// Which subcarriers of one receiver see interference.
///
/// Displayed as a bit string over subcarriers 1..M where `0` marks an
/// interfered subcarrier and `1` an interference-free one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReceiverConfig {
    free: Vec<bool>,
}

impl ReceiverConfig {
    pub fn from_free(free: Vec<bool>) -> Self {
        ReceiverConfig { free }
    }

    pub fn all_free(subcarriers: usize) -> Self {
        ReceiverConfig {
            free: vec![true; subcarriers],
        }
    }

    pub fn all_interfered(subcarriers: usize) -> Self {
        ReceiverConfig {
            free: vec![false; subcarriers],
        }
    }

    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    pub fn is_interfered(&self, j: usize) -> bool {
        !self.free[j]
    }

    pub fn interfered_count(&self) -> usize {
        self.free.iter().filter(|&&f| !f).count()
    }

    pub fn free(&self) -> &[bool] {
        &self.free
    }

    /// The same configuration with subcarriers relabelled: subcarrier `j`
    /// moves to position `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut free = vec![true; self.free.len()];
        for (j, &p) in perm.iter().enumerate() {
            free[p] = self.free[j];
        }
        ReceiverConfig { free }
    }
}

impl fmt::Display for ReceiverConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.free {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for ReceiverConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let free = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidParams(format!("bad mask character {c:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ReceiverConfig { free })
    }
}

/// Transmit or receive signal of one subcarrier: q levels × T slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubcarrierSignal {
    symbols: Matrix,
}

impl SubcarrierSignal {
    pub fn new(symbols: Matrix) -> Self {
        SubcarrierSignal { symbols }
    }

    pub fn zeros(field: Field, q: usize, slots: usize) -> Self {
        SubcarrierSignal {
            symbols: Matrix::zeros(field, q, slots),
        }
    }

    pub fn symbols(&self) -> &Matrix {
        &self.symbols
    }

    pub fn levels(&self) -> usize {
        self.symbols.rows()
    }

    pub fn slots(&self) -> usize {
        self.symbols.cols()
    }

    pub fn add(&self, other: &SubcarrierSignal) -> Result<SubcarrierSignal> {
        Ok(SubcarrierSignal {
            symbols: self.symbols.add(&other.symbols)?,
        })
    }
}

fn check_levels(p: &ChannelParams, x: &SubcarrierSignal) -> Result<()> {
    if x.levels() != p.q() {
        return Err(Error::DimensionMismatch(format!(
            "signal has {} levels, channel has q={}",
            x.levels(),
            p.q()
        )));
    }
    Ok(())
}

/// Output of one subcarrier: `G^(q-n)·x_own`, plus `G^(q-k)·x_other` when
/// the cross link is active; applied slot by slot.
pub fn apply_channel(
    p: &ChannelParams,
    x_own: &SubcarrierSignal,
    x_other: &SubcarrierSignal,
    interfered: bool,
) -> Result<SubcarrierSignal> {
    check_levels(p, x_own)?;
    check_levels(p, x_other)?;
    if x_own.slots() != x_other.slots() {
        return Err(Error::DimensionMismatch(format!(
            "slot counts differ: {} vs {}",
            x_own.slots(),
            x_other.slots()
        )));
    }
    let direct = Matrix::shift(p.field(), p.q(), p.direct_shift()).mul(x_own.symbols())?;
    if !interfered {
        return Ok(SubcarrierSignal::new(direct));
    }
    let cross = Matrix::shift(p.field(), p.q(), p.cross_shift()).mul(x_other.symbols())?;
    Ok(SubcarrierSignal::new(direct.add(&cross)?))
}

/// Passes every subcarrier through [`apply_channel`] under a static
/// configuration.
pub fn receive(
    p: &ChannelParams,
    cfg: &ReceiverConfig,
    own: &[SubcarrierSignal],
    other: &[SubcarrierSignal],
) -> Result<Vec<SubcarrierSignal>> {
    let m = p.subcarriers();
    if cfg.len() != m || own.len() != m || other.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "expected {m} subcarriers, got mask {}, own {}, other {}",
            cfg.len(),
            own.len(),
            other.len()
        )));
    }
    own.iter()
        .zip(other)
        .enumerate()
        .map(|(j, (x, v))| apply_channel(p, x, v, cfg.is_interfered(j)))
        .collect()
}

/// Smallest `(n, k)` with `k / n = alpha`.
pub fn minimal_levels(alpha: Rational) -> Result<(usize, usize)> {
    if alpha < Rational::zero() || alpha > rational::int(2) {
        return Err(Error::InvalidParams(format!(
            "alpha={} outside [0, 2]",
            rational::format(&alpha)
        )));
    }
    Ok((*alpha.denom() as usize, *alpha.numer() as usize))
}

/// Rows of the circulant family: row 1 is `M-L` ones followed by `L` zeros,
/// each further row is the previous one shifted right cyclically.
pub fn circulant_configs(subcarriers: usize, interfered: usize) -> Result<Vec<ReceiverConfig>> {
    if interfered == 0 || interfered > subcarriers {
        return Err(Error::InvalidParams(format!(
            "circulant family needs 1 <= L <= M, got L={interfered}, M={subcarriers}"
        )));
    }
    let first: Vec<bool> = (0..subcarriers).map(|j| j < subcarriers - interfered).collect();
    Ok((0..subcarriers)
        .map(|shift| {
            let free = (0..subcarriers)
                .map(|j| first[(j + subcarriers - shift) % subcarriers])
                .collect();
            ReceiverConfig { free }
        })
        .collect())
}

/// Every configuration with exactly `interfered` interfered subcarriers, in
/// lexicographic order of the mask string.
pub fn all_configs(subcarriers: usize, interfered: usize) -> Vec<ReceiverConfig> {
    assert!(subcarriers <= MAX_SUBCARRIERS, "too many subcarriers to enumerate");
    if interfered > subcarriers {
        return Vec::new();
    }
    (0u32..1 << subcarriers)
        .filter(|bits| (subcarriers as u32 - bits.count_ones()) as usize == interfered)
        .map(|bits| ReceiverConfig {
            free: (0..subcarriers)
                .map(|j| bits >> (subcarriers - 1 - j) & 1 == 1)
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_level_pairs() {
        assert_eq!(minimal_levels(rational::frac(3, 5)).unwrap(), (5, 3));
        assert_eq!(minimal_levels(rational::int(0)).unwrap(), (1, 0));
        assert_eq!(minimal_levels(rational::frac(6, 4)).unwrap(), (2, 3));
        assert!(minimal_levels(rational::frac(5, 2)).is_err());
    }
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn signal(field: Field, col: &[u16]) -> SubcarrierSignal {
        let rows: Vec<Vec<u16>> = col.iter().map(|&v| vec![v]).collect();
        SubcarrierSignal::new(Matrix::from_rows(field, &rows).unwrap())
    }

    fn masks(cfgs: &[ReceiverConfig]) -> Vec<String> {
        cfgs.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn params_validation() {
        assert!(ChannelParams::new(0, 0, 2, 1, 8).is_err());
        assert!(ChannelParams::new(1, 3, 2, 1, 8).is_err());
        assert!(ChannelParams::new(1, 1, 2, 0, 8).is_err());
        assert!(ChannelParams::new(1, 1, 2, 3, 8).is_err());
        let p = ChannelParams::new(3, 2, 4, 1, 8).unwrap();
        assert_eq!(p.q(), 3);
        assert_eq!(p.alpha(), rational::frac(2, 3));
        assert_eq!(ChannelParams::new(2, 3, 4, 1, 8).unwrap().q(), 3);
    }

    #[test]
    fn non_integral_levels_report_multiplier() {
        let p = ChannelParams::new(3, 1, 2, 1, 8).unwrap();
        assert_eq!(p.levels(rational::frac(2, 3), "(1-alpha)n").unwrap(), 2);
        match p.levels(rational::frac(1, 2), "n/2") {
            Err(Error::NonIntegral { multiplier, .. }) => assert_eq!(multiplier, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn toy_subcarrier_adds_bits() {
        let f = Field::new(1).unwrap();
        let p = ChannelParams::new(1, 1, 2, 1, 1).unwrap();
        let y = apply_channel(&p, &signal(f, &[1]), &signal(f, &[1]), true).unwrap();
        assert_eq!(y.symbols().data(), &[0]);
        let y = apply_channel(&p, &signal(f, &[1]), &signal(f, &[0]), true).unwrap();
        assert_eq!(y.symbols().data(), &[1]);
    }

    #[test]
    fn interference_free_is_direct_only() {
        let f = Field::default();
        let p = ChannelParams::new(2, 3, 2, 1, 8).unwrap();
        let x = signal(f, &[5, 6, 7]);
        let v = signal(f, &[9, 9, 9]);
        let y = apply_channel(&p, &x, &v, false).unwrap();
        assert_eq!(y.symbols().data(), &[0, 5, 6]);
    }

    #[test]
    fn two_level_example() {
        // n=2, k=1: (a, b) with cross (c, d) gives (a, b + c).
        let f = Field::default();
        let p = ChannelParams::new(2, 1, 1, 1, 8).unwrap();
        let (a, b, c, d) = (0x11, 0x22, 0x40, 0x80);
        let y = apply_channel(&p, &signal(f, &[a, b]), &signal(f, &[c, d]), true).unwrap();
        assert_eq!(y.symbols().data(), &[a, b ^ c]);
    }

    #[test]
    fn size_mismatch_rejected() {
        let f = Field::default();
        let p = ChannelParams::new(2, 1, 1, 1, 8).unwrap();
        assert!(apply_channel(&p, &signal(f, &[1]), &signal(f, &[1, 2]), true).is_err());
    }

    #[test]
    fn receive_toy_pattern() {
        let f = Field::new(1).unwrap();
        let p = ChannelParams::new(1, 1, 2, 1, 1).unwrap();
        let own = vec![signal(f, &[1]), signal(f, &[0])];
        let other = vec![signal(f, &[1]), signal(f, &[1])];
        let cfg: ReceiverConfig = "10".parse().unwrap();
        let y = receive(&p, &cfg, &own, &other).unwrap();
        assert_eq!(y[0].symbols().data(), &[1]);
        assert_eq!(y[1].symbols().data(), &[1]);
        let clean = receive(&p, &ReceiverConfig::all_free(2), &own, &other).unwrap();
        assert_eq!(clean[0].symbols().data(), &[1]);
        assert_eq!(clean[1].symbols().data(), &[0]);
    }

    #[test]
    fn receive_matches_per_subcarrier() {
        let f = Field::default();
        let p = ChannelParams::new(2, 1, 3, 1, 8).unwrap();
        let cfg = &circulant_configs(3, 1).unwrap()[0];
        assert_eq!(cfg.to_string(), "110");
        let own: Vec<_> = (0..3).map(|j| signal(f, &[j + 1, j + 4])).collect();
        let other: Vec<_> = (0..3).map(|j| signal(f, &[j + 7, j + 10])).collect();
        let y = receive(&p, cfg, &own, &other).unwrap();
        for j in 0..3 {
            let expect = apply_channel(&p, &own[j], &other[j], j == 2).unwrap();
            assert_eq!(y[j], expect);
        }
        assert_ne!(y[2], apply_channel(&p, &own[2], &other[2], false).unwrap());
    }

    #[test]
    fn receive_length_mismatch() {
        let f = Field::default();
        let p = ChannelParams::new(1, 1, 2, 1, 8).unwrap();
        let one = vec![signal(f, &[1])];
        assert!(receive(&p, &ReceiverConfig::all_free(2), &one, &one).is_err());
    }

    #[test]
    fn circulant_examples() {
        assert_eq!(masks(&circulant_configs(3, 1).unwrap()), ["110", "011", "101"]);
        assert_eq!(masks(&circulant_configs(2, 2).unwrap()), ["00", "00"]);
        assert_eq!(
            masks(&circulant_configs(4, 2).unwrap()),
            ["1100", "0110", "0011", "1001"]
        );
        assert!(circulant_configs(3, 0).is_err());
        assert!(circulant_configs(3, 4).is_err());
    }

    #[test]
    fn all_config_examples() {
        assert_eq!(masks(&all_configs(2, 1)), ["01", "10"]);
        assert_eq!(all_configs(4, 2).len(), 6);
        let five = all_configs(5, 2);
        assert_eq!(five.len(), 10);
        assert!(five.iter().all(|c| c.interfered_count() == 2));
        let mut sorted = masks(&five);
        sorted.sort();
        assert_eq!(sorted, masks(&five));
    }

    #[test]
    fn circulant_subset_of_all() {
        for m in 2..=6 {
            for l in 1..=m {
                let all = all_configs(m, l);
                for c in circulant_configs(m, l).unwrap() {
                    assert!(all.contains(&c), "M={m} L={l} {c}");
                }
            }
        }
    }

    #[test]
    fn receive_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let n = rng.gen_range(1..4);
            let k = rng.gen_range(0..=2 * n);
            let m = rng.gen_range(1..4);
            let p = ChannelParams::new(n, k, m, 1, 8).unwrap();
            let f = p.field();
            let slots = rng.gen_range(1..3);
            let draw = |rng: &mut ChaCha8Rng| -> Vec<SubcarrierSignal> {
                (0..m)
                    .map(|_| SubcarrierSignal::new(Matrix::random(f, p.q(), slots, rng)))
                    .collect()
            };
            let (x, x2, v, v2) = (draw(&mut rng), draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let sum = |a: &[SubcarrierSignal], b: &[SubcarrierSignal]| -> Vec<SubcarrierSignal> {
                a.iter().zip(b).map(|(a, b)| a.add(b).unwrap()).collect()
            };
            let cfg = ReceiverConfig::from_free((0..m).map(|_| rng.gen()).collect());
            let lhs = receive(&p, &cfg, &sum(&x, &x2), &sum(&v, &v2)).unwrap();
            let rhs = sum(
                &receive(&p, &cfg, &x, &v).unwrap(),
                &receive(&p, &cfg, &x2, &v2).unwrap(),
            );
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn weak_cross_term_avoids_top_levels() {
        let f = Field::new(2).unwrap();
        for n in 1..=4 {
            for k in 0..=n {
                let p = ChannelParams::new(n, k, 1, 1, 2).unwrap();
                let zero = SubcarrierSignal::zeros(f, p.q(), 1);
                for bits in 0u32..1 << p.q() {
                    let col: Vec<u16> = (0..p.q()).map(|i| (bits >> i & 1) as u16).collect();
                    let y = apply_channel(&p, &zero, &signal(f, &col), true).unwrap();
                    for lvl in 0..p.q() - k {
                        assert_eq!(y.symbols().get(lvl, 0), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn strong_regime_top_levels_are_pure_interference() {
        let f = Field::new(2).unwrap();
        for n in 1..=3 {
            for k in n..=2 * n {
                let p = ChannelParams::new(n, k, 1, 1, 2).unwrap();
                let zero = SubcarrierSignal::zeros(f, p.q(), 1);
                for bits in 0u32..1 << p.q() {
                    let col: Vec<u16> = (0..p.q()).map(|i| (bits >> i & 1) as u16).collect();
                    let y = apply_channel(&p, &signal(f, &col), &zero, false).unwrap();
                    for lvl in 0..k - n {
                        assert_eq!(y.symbols().get(lvl, 0), 0);
                    }
                }
            }
        }
    }
}
