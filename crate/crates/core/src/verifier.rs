//! Zero-error decodability of linear schemes under the degraded message-set
//! requirements.
//!
//! A receiver in a given configuration sees `y = A_dec·w + A_other·v`, where
//! `w` stacks the messages it must decode and `v` stacks everything else:
//! its own messages it is not required to decode and the other user's
//! entire message, seen through the active cross links. The requirement
//! holds iff `w` is uniquely determined by `y`.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{all_configs, ChannelParams, ReceiverConfig};
use crate::error::{Error, Result};
use crate::field::{decodability, Field, Matrix, RankTriple};
use crate::rational::{frac, Rational};
use crate::schemes::{build_corner_scheme, Corner, LinearScheme, MessageClass, Setup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DecodeClass {
    AllInterfered,
    ExactlyL,
    InterferenceFree,
}

impl DecodeClass {
    pub const ALL: [DecodeClass; 3] = [
        DecodeClass::AllInterfered,
        DecodeClass::ExactlyL,
        DecodeClass::InterferenceFree,
    ];

    /// Messages that must be decoded; nested across the classes.
    pub fn required(self) -> &'static [MessageClass] {
        match self {
            DecodeClass::AllInterfered => &[MessageClass::WM],
            DecodeClass::ExactlyL => &[MessageClass::WL, MessageClass::WM],
            DecodeClass::InterferenceFree => &[MessageClass::W0, MessageClass::WL, MessageClass::WM],
        }
    }

    pub fn configs(self, p: &ChannelParams) -> Vec<ReceiverConfig> {
        match self {
            DecodeClass::AllInterfered => vec![ReceiverConfig::all_interfered(p.subcarriers())],
            DecodeClass::ExactlyL => all_configs(p.subcarriers(), p.interfered()),
            DecodeClass::InterferenceFree => vec![ReceiverConfig::all_free(p.subcarriers())],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DecodeClass::AllInterfered => "all-interfered",
            DecodeClass::ExactlyL => "exactly-l",
            DecodeClass::InterferenceFree => "interference-free",
        }
    }
}

/// Stacked maps seen by one receiver.
#[derive(Clone, Debug)]
pub struct ReceiverMaps {
    pub decoded: Matrix,
    pub other: Matrix,
}

/// Maps seen by user 1's receiver.
pub fn assemble_maps(s: &LinearScheme, cfg: &ReceiverConfig, cls: DecodeClass) -> Result<ReceiverMaps> {
    assemble_maps_for(s, 0, cfg, cls, cls.required())
}

/// Maps seen by `user`'s receiver (0 or 1) when it must decode `required`.
pub fn assemble_maps_for(
    s: &LinearScheme,
    user: usize,
    cfg: &ReceiverConfig,
    _cls: DecodeClass,
    required: &[MessageClass],
) -> Result<ReceiverMaps> {
    let p = s.params();
    let m = p.subcarriers();
    if cfg.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "mask has {} subcarriers, scheme has {m}",
            cfg.len()
        )));
    }
    let other_user = 1 - user;
    let block_rows = p.q() * s.slots();
    let direct = p.direct_map(s.slots());
    let cross = p.cross_map(s.slots());
    let nuisance: Vec<MessageClass> = MessageClass::ALL
        .into_iter()
        .filter(|c| !required.contains(c))
        .collect();
    let any_interfered = (0..m).any(|j| cfg.is_interfered(j));

    let dec_cols: usize = required.iter().map(|&c| s.dim(c)).sum();
    let own_nuis_cols: usize = nuisance.iter().map(|&c| s.dim(c)).sum();
    let cross_cols: usize = if any_interfered {
        MessageClass::ALL.iter().map(|&c| s.dim(c)).sum()
    } else {
        0
    };
    let field = p.field();
    let mut decoded = Matrix::zeros(field, m * block_rows, dec_cols);
    let mut other = Matrix::zeros(field, m * block_rows, own_nuis_cols + cross_cols);

    let place = |target: &mut Matrix, block: &Matrix, row0: usize, col0: usize| {
        for r in 0..block.rows() {
            for c in 0..block.cols() {
                let v = block.get(r, c);
                if v != 0 {
                    target.set(row0 + r, col0 + c, v);
                }
            }
        }
    };

    for j in 0..m {
        let row0 = j * block_rows;
        let mut col = 0;
        for &c in required {
            let img = direct.mul(s.generator(user, j, c))?;
            place(&mut decoded, &img, row0, col);
            col += s.dim(c);
        }
        let mut col = 0;
        for &c in &nuisance {
            let img = direct.mul(s.generator(user, j, c))?;
            place(&mut other, &img, row0, col);
            col += s.dim(c);
        }
        if cfg.is_interfered(j) {
            for c in MessageClass::ALL {
                let img = cross.mul(s.generator(other_user, j, c))?;
                place(&mut other, &img, row0, col);
                col += s.dim(c);
            }
        }
    }
    Ok(ReceiverMaps { decoded, other })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyEntry {
    pub user: usize,
    pub class: DecodeClass,
    pub mask: ReceiverConfig,
    pub decoded_cols: usize,
    pub ranks: RankTriple,
    pub pass: bool,
}

impl fmt::Display for VerifyEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "user={} class={} mask={} symbols={} rank_dec={} rank_other={} rank_joint={} {}",
            self.user + 1,
            self.class.name(),
            self.mask,
            self.decoded_cols,
            self.ranks.decoded,
            self.ranks.nuisance,
            self.ranks.joint,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub entries: Vec<VerifyEntry>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerifyEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    /// One line per (user, class, mask), then an overall verdict.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out.push_str(if self.passed() { "overall PASS\n" } else { "overall FAIL\n" });
        out
    }
}

fn check(s: &LinearScheme, user: usize, class: DecodeClass, mask: ReceiverConfig) -> Result<VerifyEntry> {
    let maps = assemble_maps_for(s, user, &mask, class, class.required())?;
    let ranks = decodability(&maps.decoded, &maps.other)?;
    let decoded_cols = maps.decoded.cols();
    Ok(VerifyEntry {
        user,
        class,
        mask,
        decoded_cols,
        pass: ranks.is_unique(decoded_cols),
        ranks,
    })
}

/// Checks all three decode classes for both users: the all-interfered
/// mask, every mask with exactly L interfered subcarriers, and the
/// interference-free mask.
pub fn verify(s: &LinearScheme) -> VerifyReport {
    let p = s.params();
    let jobs: Vec<(usize, DecodeClass, ReceiverConfig)> = (0..2)
        .flat_map(|user| {
            DecodeClass::ALL
                .into_iter()
                .flat_map(move |class| class.configs(p).into_iter().map(move |m| (user, class, m)))
        })
        .collect();
    let entries = jobs
        .into_par_iter()
        .map(|(user, class, mask)| check(s, user, class, mask).expect("scheme dimensions are validated"))
        .collect();
    VerifyReport { entries }
}

/// Sanity check of degradedness: for sampled masks with exactly L
/// interfered subcarriers, clearing some of those interferences must keep
/// `(W_L, W_M)` decodable. Returns the first violating sub-mask, if any.
pub fn submask_violation(s: &LinearScheme, samples: usize, seed: u64) -> Result<Option<ReceiverConfig>> {
    let p = s.params();
    let masks = all_configs(p.subcarriers(), p.interfered());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let base = &masks[rng.gen_range(0..masks.len())];
        let free: Vec<bool> = base
            .free()
            .iter()
            .map(|&f| f || rng.gen_bool(0.5))
            .collect();
        let sub = ReceiverConfig::from_free(free);
        for user in 0..2 {
            let e = check(s, user, DecodeClass::ExactlyL, sub.clone())?;
            if !e.pass {
                return Ok(Some(sub));
            }
        }
    }
    Ok(None)
}

/// Maximum slot count accepted by [`toy_oracle`].
pub const TOY_MAX_SLOTS: usize = 2;

/// Is `g` (bits) in reduced column echelon form with full column rank?
fn is_rcef(g: &Matrix) -> bool {
    let mut last_pivot: Option<usize> = None;
    for c in 0..g.cols() {
        let Some(pivot) = (0..g.rows()).find(|&r| g.get(r, c) != 0) else {
            return false;
        };
        if last_pivot.is_some_and(|p| pivot <= p) {
            return false;
        }
        if g.get(pivot, c) != 1 {
            return false;
        }
        for other in 0..g.cols() {
            if other != c && g.get(pivot, other) != 0 {
                return false;
            }
        }
        last_pivot = Some(pivot);
    }
    true
}

fn canonical_blocks(field: Field, rows: usize, cols: usize) -> Vec<Matrix> {
    let total = rows * cols;
    (0u64..1 << total)
        .filter_map(|bits| {
            let data = (0..total).map(|i| (bits >> i & 1) as u16).collect();
            let g = Matrix::from_vec(field, rows, cols, data).expect("sized");
            is_rcef(&g).then_some(g)
        })
        .collect()
}

/// The introductory two-subcarrier example: M=2, n=k=1, GF(2), L=1.
pub fn toy_params() -> ChannelParams {
    ChannelParams::new(1, 1, 2, 1, 1).expect("valid toy parameters")
}

/// Every `(R1, R0)` pair reached by a symmetric linear scheme on the toy
/// channel with at most `max_slots` slots.
///
/// Encoders are enumerated up to invertible reparametrization of each
/// message block (reduced column echelon form), which preserves every
/// decodability condition.
pub fn toy_oracle(max_slots: usize) -> Result<BTreeSet<(Rational, Rational)>> {
    if max_slots == 0 || max_slots > TOY_MAX_SLOTS {
        return Err(Error::SearchTooLarge(format!(
            "toy oracle supports 1..={TOY_MAX_SLOTS} slots, got {max_slots}"
        )));
    }
    let p = toy_params();
    let field = p.field();
    let mut found = BTreeSet::new();
    for slots in 1..=max_slots {
        let bits = p.subcarriers() * slots;
        let blocks: Vec<Vec<Matrix>> = (0..=bits).map(|d| canonical_blocks(field, bits, d)).collect();
        for dl in 0..=bits {
            for d0 in 0..=bits - dl {
                let candidates: Vec<(usize, usize)> = (0..blocks[dl].len())
                    .flat_map(|a| (0..blocks[d0].len()).map(move |b| (a, b)))
                    .collect();
                let hit = candidates.par_iter().any(|&(a, b)| {
                    let s = toy_scheme(&p, slots, &blocks[dl][a], &blocks[d0][b]);
                    verify(&s).passed()
                });
                if hit {
                    found.insert((
                        frac(dl as i128, slots as i128),
                        frac(d0 as i128, slots as i128),
                    ));
                }
            }
        }
    }
    Ok(found)
}

/// Splits a `(2T × d)` encoder into per-subcarrier generators (subcarrier
/// j owns rows `j*T..(j+1)*T`).
fn toy_scheme(p: &ChannelParams, slots: usize, wl: &Matrix, w0: &Matrix) -> LinearScheme {
    let field = p.field();
    let gens: Vec<[Matrix; 3]> = (0..p.subcarriers())
        .map(|j| {
            let rows: Vec<usize> = (j * slots..(j + 1) * slots).collect();
            [
                w0.select_rows(&rows),
                wl.select_rows(&rows),
                Matrix::zeros(field, slots, 0),
            ]
        })
        .collect();
    LinearScheme::symmetric(*p, slots, [w0.cols(), wl.cols(), 0], gens).expect("toy dimensions")
}

/// Request for [`max_rate_search`].
#[derive(Clone, Debug)]
pub struct SearchRequest {
    pub params: ChannelParams,
    pub setup: Setup,
    /// Class whose rate is maximized.
    pub maximize: MessageClass,
    /// The other axis of the setup is held at this many symbols per block.
    pub fixed_symbols: usize,
    pub slots: usize,
    pub seed: u64,
    /// Random draws per candidate dimension.
    pub budget: usize,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Best verified symbols per block for the maximized class.
    pub best_symbols: usize,
    /// Same, normalized by `T·n`.
    pub best_rate: Rational,
    pub scheme: Option<LinearScheme>,
    /// True if some candidate dimension was left undecided when the draw
    /// budget ran out.
    pub budget_exhausted: bool,
}

/// Own-level symbol count above which the search refuses to run.
pub const SEARCH_MAX_SYMBOLS: usize = 24;

/// Seeded random search for the largest verifiable rate of one class with
/// the other held fixed. Falls back on the closed-form corners as a
/// baseline; never claims optimality.
pub fn max_rate_search(req: &SearchRequest) -> Result<SearchOutcome> {
    let p = req.params;
    let (x, y) = req.setup.axes();
    if req.maximize != x && req.maximize != y {
        return Err(Error::InvalidParams(format!(
            "{} is not an axis of the {} setup",
            req.maximize.name(),
            req.setup
        )));
    }
    let fixed_class = if req.maximize == x { y } else { x };
    let own_levels = p.subcarriers() * p.n() * req.slots;
    if own_levels > SEARCH_MAX_SYMBOLS {
        return Err(Error::SearchTooLarge(format!(
            "{own_levels} own-level symbols per block exceeds {SEARCH_MAX_SYMBOLS}"
        )));
    }
    let norm = (req.slots * p.n()) as i128;

    // Baseline from the closed-form corners, trimmed to the fixed dimension.
    let mut best_symbols = 0;
    let mut best_scheme = None;
    for corner in Corner::for_setup(req.setup) {
        if !corner.applies(p.alpha()) {
            continue;
        }
        let Ok(s) = build_corner_scheme(&p, corner, req.seed) else {
            continue;
        };
        if s.slots() != req.slots {
            continue;
        }
        if s.dim(fixed_class) < req.fixed_symbols {
            continue;
        }
        let trimmed = trim_class(&s, fixed_class, req.fixed_symbols)?;
        if verify(&trimmed).passed() && trimmed.dim(req.maximize) > best_symbols {
            best_symbols = trimmed.dim(req.maximize);
            best_scheme = Some(trimmed);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let mut budget_exhausted = false;
    let rows = p.q() * req.slots;
    let populated: Vec<usize> = (0..req.slots)
        .flat_map(|t| (0..p.n()).map(move |l| t * p.q() + l))
        .collect();
    for target in best_symbols + 1..=own_levels.saturating_sub(req.fixed_symbols) {
        let mut hit = None;
        for _ in 0..req.budget {
            let mut dims = [0; 3];
            dims[req.maximize.index()] = target;
            dims[fixed_class.index()] = req.fixed_symbols;
            let gens: [Vec<[Matrix; 3]>; 2] = std::array::from_fn(|_| {
                (0..p.subcarriers())
                    .map(|_| {
                        std::array::from_fn(|c| {
                            let mut g = Matrix::zeros(p.field(), rows, dims[c]);
                            for &r in &populated {
                                for col in 0..dims[c] {
                                    g.set(r, col, p.field().random(&mut rng));
                                }
                            }
                            g
                        })
                    })
                    .collect()
            });
            let s = LinearScheme::new(p, req.slots, dims, gens)?;
            if verify(&s).passed() {
                hit = Some(s);
                break;
            }
        }
        match hit {
            Some(s) => {
                best_symbols = target;
                best_scheme = Some(s);
            }
            None => {
                budget_exhausted = true;
                break;
            }
        }
    }
    Ok(SearchOutcome {
        best_symbols,
        best_rate: frac(best_symbols as i128, norm),
        scheme: best_scheme,
        budget_exhausted,
    })
}

/// Keeps only the first `keep` symbols of `class`.
fn trim_class(s: &LinearScheme, class: MessageClass, keep: usize) -> Result<LinearScheme> {
    let mut dims = s.dims();
    dims[class.index()] = keep;
    let cols: Vec<usize> = (0..keep).collect();
    let generators = s.generators().clone().map(|user| {
        user.into_iter()
            .map(|mut per_class| {
                per_class[class.index()] = per_class[class.index()].select_cols(&cols);
                per_class
            })
            .collect()
    });
    LinearScheme::new(*s.params(), s.slots(), dims, generators)
}
