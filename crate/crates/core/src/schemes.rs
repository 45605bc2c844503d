//! Explicit linear schemes for every achievable corner point.
//!
//! A scheme maps each user's message symbols onto the levels of its `M`
//! subcarriers over `T` slots. Most constructions place messages on fixed
//! level bands, uncoded or protected by an MDS code across subcarriers.
//! The Han–Kobayashi and strong-interference constructions draw seeded
//! random generators for their common parts and keep the first draw the
//! verifier certifies.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::field::{Field, Matrix};
use crate::rational::{self, frac, int, Rational};
use crate::region::RatePoint;
use crate::verifier;

/// Seeded attempts for the randomized constructions.
pub const MAX_RETRIES: u64 = 64;

/// The nested messages of one user.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MessageClass {
    /// Decoded only when every subcarrier is interference free.
    W0,
    /// Decoded whenever at most the designated L subcarriers are interfered.
    WL,
    /// Decoded even when all subcarriers are interfered.
    WM,
}

impl MessageClass {
    pub const ALL: [MessageClass; 3] = [MessageClass::W0, MessageClass::WL, MessageClass::WM];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            MessageClass::W0 => "W0",
            MessageClass::WL => "WL",
            MessageClass::WM => "WM",
        }
    }
}

impl FromStr for MessageClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "W0" | "w0" | "0" => Ok(MessageClass::W0),
            "WL" | "wl" | "L" => Ok(MessageClass::WL),
            "WM" | "wm" | "M" => Ok(MessageClass::WM),
            _ => Err(Error::InvalidParams(format!("unknown message class {s:?}"))),
        }
    }
}

/// The two two-dimensional slices of the rate region that are studied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Setup {
    /// `R_M = 0`; points are `(R_L, R_0)`.
    R0RL,
    /// `R_0 = 0`; points are `(R_M, R_L)`.
    RLRM,
}

impl Setup {
    pub const ALL: [Setup; 2] = [Setup::R0RL, Setup::RLRM];

    /// Message classes on the (x, y) axes.
    pub fn axes(self) -> (MessageClass, MessageClass) {
        match self {
            Setup::R0RL => (MessageClass::WL, MessageClass::W0),
            Setup::RLRM => (MessageClass::WM, MessageClass::WL),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Setup::R0RL => "r0rl",
            Setup::RLRM => "rlrm",
        }
    }
}

impl fmt::Display for Setup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Setup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "r0rl" => Ok(Setup::R0RL),
            "rlrm" => Ok(Setup::RLRM),
            _ => Err(Error::InvalidParams(format!("unknown setup {s:?} (r0rl|rlrm)"))),
        }
    }
}

/// Construction families. The message classes each family feeds depend on
/// the setup; see [`Corner`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CornerKind {
    TopLevels,
    PrivateSplit,
    ErasureAll,
    Alignment,
    AlignmentErasure,
    HanKobayashi,
    HanKobayashiBase,
    StrongAlign,
    StrongAlignErasure,
    StrongOrthogonal,
    StrongOrthogonalBase,
}

impl CornerKind {
    pub const ALL: [CornerKind; 11] = [
        CornerKind::TopLevels,
        CornerKind::PrivateSplit,
        CornerKind::ErasureAll,
        CornerKind::Alignment,
        CornerKind::AlignmentErasure,
        CornerKind::HanKobayashi,
        CornerKind::HanKobayashiBase,
        CornerKind::StrongAlign,
        CornerKind::StrongAlignErasure,
        CornerKind::StrongOrthogonal,
        CornerKind::StrongOrthogonalBase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CornerKind::TopLevels => "top-levels",
            CornerKind::PrivateSplit => "private-split",
            CornerKind::ErasureAll => "erasure-all",
            CornerKind::Alignment => "alignment",
            CornerKind::AlignmentErasure => "alignment-erasure",
            CornerKind::HanKobayashi => "han-kobayashi",
            CornerKind::HanKobayashiBase => "han-kobayashi-base",
            CornerKind::StrongAlign => "strong-align",
            CornerKind::StrongAlignErasure => "strong-align-erasure",
            CornerKind::StrongOrthogonal => "strong-orthogonal",
            CornerKind::StrongOrthogonalBase => "strong-orthogonal-base",
        }
    }
}

impl FromStr for CornerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CornerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = CornerKind::ALL.iter().map(|k| k.name()).collect();
                Error::InvalidParams(format!("unknown corner {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// One achievable corner family: a construction in a given setup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Corner {
    setup: Setup,
    kind: CornerKind,
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.setup.name(), self.kind.name())
    }
}

impl Corner {
    pub fn new(setup: Setup, kind: CornerKind) -> Result<Self> {
        let ok = match setup {
            Setup::R0RL => !matches!(
                kind,
                CornerKind::HanKobayashiBase | CornerKind::StrongOrthogonalBase
            ),
            Setup::RLRM => kind != CornerKind::TopLevels,
        };
        if !ok {
            return Err(Error::InvalidParams(format!(
                "corner {} does not exist in the {} setup",
                kind.name(),
                setup.name()
            )));
        }
        Ok(Corner { setup, kind })
    }

    /// Every corner family of both setups.
    pub fn all() -> Vec<Corner> {
        Setup::ALL
            .into_iter()
            .flat_map(|s| CornerKind::ALL.into_iter().filter_map(move |k| Corner::new(s, k).ok()))
            .collect()
    }

    pub fn for_setup(setup: Setup) -> Vec<Corner> {
        Corner::all().into_iter().filter(|c| c.setup == setup).collect()
    }

    pub fn setup(&self) -> Setup {
        self.setup
    }

    pub fn kind(&self) -> CornerKind {
        self.kind
    }

    /// Closed interval of alpha over which the construction works.
    pub fn alpha_range(&self) -> (Rational, Rational) {
        match self.kind {
            CornerKind::TopLevels => (int(0), int(2)),
            CornerKind::PrivateSplit | CornerKind::ErasureAll => (int(0), int(1)),
            CornerKind::Alignment | CornerKind::AlignmentErasure => (frac(1, 2), frac(2, 3)),
            CornerKind::HanKobayashi | CornerKind::HanKobayashiBase => (frac(2, 3), int(1)),
            CornerKind::StrongAlign
            | CornerKind::StrongAlignErasure
            | CornerKind::StrongOrthogonal
            | CornerKind::StrongOrthogonalBase => (int(1), int(2)),
        }
    }

    pub fn applies(&self, alpha: Rational) -> bool {
        let (lo, hi) = self.alpha_range();
        lo <= alpha && alpha <= hi
    }

    /// Rate pair normalized by n, in the setup's (x, y) coordinates.
    pub fn rate(&self, subcarriers: usize, interfered: usize, alpha: Rational) -> RatePoint {
        let m = int(subcarriers as i128);
        let l = int(interfered as i128);
        let a = alpha;
        let one = int(1);
        let two = int(2);
        let three = int(3);
        let zero = int(0);
        let (x, y) = match (self.setup, self.kind) {
            (Setup::R0RL, CornerKind::TopLevels) => (zero, m),
            (Setup::R0RL, CornerKind::PrivateSplit) => (m * (one - a), m * a),
            (Setup::R0RL, CornerKind::ErasureAll) => (m - l * a, zero),
            (Setup::R0RL, CornerKind::Alignment) => (m * a, m * (two - three * a)),
            (Setup::R0RL, CornerKind::AlignmentErasure) => {
                (m * a + (m - l) * (two - three * a), zero)
            }
            (Setup::R0RL, CornerKind::HanKobayashi) => (m * (one - a / two), zero),
            (Setup::R0RL, CornerKind::StrongAlign) => (m * (a - one), m * (two - a)),
            (Setup::R0RL, CornerKind::StrongAlignErasure) => (m - l * (two - a), zero),
            (Setup::R0RL, CornerKind::StrongOrthogonal) => (m * a / two, zero),
            (Setup::RLRM, CornerKind::PrivateSplit) => (m * (one - a), (m - l) * a),
            (Setup::RLRM, CornerKind::ErasureAll) => (zero, m - l * a),
            (Setup::RLRM, CornerKind::Alignment) => (m * a, (m - l) * (two - three * a)),
            (Setup::RLRM, CornerKind::AlignmentErasure) => {
                (zero, m * a + (m - l) * (two - three * a))
            }
            (Setup::RLRM, CornerKind::HanKobayashi) => (zero, m * (one - a / two)),
            (Setup::RLRM, CornerKind::HanKobayashiBase) => (m * (one - a / two), zero),
            (Setup::RLRM, CornerKind::StrongAlign) => (m * (a - one), (m - l) * (two - a)),
            (Setup::RLRM, CornerKind::StrongAlignErasure) => (zero, m - l * (two - a)),
            (Setup::RLRM, CornerKind::StrongOrthogonal) => (zero, m * a / two),
            (Setup::RLRM, CornerKind::StrongOrthogonalBase) => (m * a / two, zero),
            _ => unreachable!("validated in Corner::new"),
        };
        RatePoint::new(x, y)
    }
}

/// Level bands of the alignment construction, top to bottom.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BandLayout {
    pub l1: usize,
    pub l2: usize,
    pub l3: usize,
    pub l4: usize,
}

impl BandLayout {
    pub fn band(&self, index: usize) -> Range<usize> {
        let sizes = [self.l1, self.l2, self.l3, self.l4];
        let start: usize = sizes[..index].iter().sum();
        start..start + sizes[index]
    }

    pub fn total(&self) -> usize {
        self.l1 + self.l2 + self.l3 + self.l4
    }
}

/// Bands for 1/2 <= alpha <= 2/3: sizes (1-a)n, (2a-1)n, (2-3a)n, (2a-1)n.
pub fn alignment_bands(p: &ChannelParams) -> Result<BandLayout> {
    let a = p.alpha();
    if a < frac(1, 2) || a > frac(2, 3) {
        return Err(Error::RegimeMismatch {
            corner: "alignment bands".into(),
            alpha: rational::format(&a),
        });
    }
    let one = int(1);
    let two = int(2);
    Ok(BandLayout {
        l1: p.levels(one - a, "(1-alpha)n")?,
        l2: p.levels(two * a - one, "(2alpha-1)n")?,
        l3: p.levels(two - int(3) * a, "(2-3alpha)n")?,
        l4: p.levels(two * a - one, "(2alpha-1)n")?,
    })
}

/// Systematic `M × (M-L)` generator of an MDS code across subcarriers: any
/// `M-L` rows form an invertible matrix.
///
/// The parity rows are all-ones when `L = 1` (single parity) or `M-L = 1`
/// (repetition); otherwise they form a Cauchy matrix, which needs
/// `2^m >= M`.
pub fn mds_generator(subcarriers: usize, interfered: usize, field: Field) -> Result<Matrix> {
    if interfered > subcarriers {
        return Err(Error::InvalidParams(format!(
            "cannot erase {interfered} of {subcarriers} subcarriers"
        )));
    }
    let dim = subcarriers - interfered;
    let mut g = Matrix::zeros(field, subcarriers, dim);
    for i in 0..dim {
        g.set(i, i, 1);
    }
    if dim == 0 || interfered == 0 {
        return Ok(g);
    }
    if interfered == 1 || dim == 1 {
        for r in dim..subcarriers {
            for c in 0..dim {
                g.set(r, c, 1);
            }
        }
        return Ok(g);
    }
    if field.size() < subcarriers {
        return Err(Error::FieldTooSmall {
            degree: field.degree(),
            len: subcarriers,
            dim,
        });
    }
    for i in 0..interfered {
        for j in 0..dim {
            let x = i as u16;
            let y = (interfered + j) as u16;
            let v = field.inv(x ^ y).expect("Cauchy points are distinct");
            g.set(dim + i, j, v);
        }
    }
    Ok(g)
}

/// A linear scheme for both users.
///
/// Generators are indexed `[user][subcarrier][class]`; each maps the
/// class's message symbols to the slot-major transmit vector of the
/// subcarrier (`q·T` rows, row `t*q + level`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearScheme {
    params: ChannelParams,
    slots: usize,
    dims: [usize; 3],
    generators: [Vec<[Matrix; 3]>; 2],
}

impl LinearScheme {
    pub fn new(
        params: ChannelParams,
        slots: usize,
        dims: [usize; 3],
        generators: [Vec<[Matrix; 3]>; 2],
    ) -> Result<Self> {
        if slots == 0 {
            return Err(Error::InvalidParams("a scheme needs at least one slot".into()));
        }
        let rows = params.q() * slots;
        for user in &generators {
            if user.len() != params.subcarriers() {
                return Err(Error::DimensionMismatch(format!(
                    "{} generator sets for {} subcarriers",
                    user.len(),
                    params.subcarriers()
                )));
            }
            for per_class in user {
                for (c, g) in per_class.iter().enumerate() {
                    if g.rows() != rows || g.cols() != dims[c] || g.field() != params.field() {
                        return Err(Error::DimensionMismatch(format!(
                            "generator is {}x{} over GF(2^{}), expected {rows}x{} over GF(2^{})",
                            g.rows(),
                            g.cols(),
                            g.field().degree(),
                            dims[c],
                            params.field().degree()
                        )));
                    }
                }
            }
        }
        Ok(LinearScheme {
            params,
            slots,
            dims,
            generators,
        })
    }

    /// Same generators for both users.
    pub fn symmetric(
        params: ChannelParams,
        slots: usize,
        dims: [usize; 3],
        generators: Vec<[Matrix; 3]>,
    ) -> Result<Self> {
        LinearScheme::new(params, slots, dims, [generators.clone(), generators])
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn dim(&self, class: MessageClass) -> usize {
        self.dims[class.index()]
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn generator(&self, user: usize, subcarrier: usize, class: MessageClass) -> &Matrix {
        &self.generators[user][subcarrier][class.index()]
    }

    pub fn generators(&self) -> &[Vec<[Matrix; 3]>; 2] {
        &self.generators
    }

    pub fn is_symmetric(&self) -> bool {
        self.generators[0] == self.generators[1]
    }

    /// Field symbols per channel use.
    pub fn symbol_rate(&self, class: MessageClass) -> Rational {
        frac(self.dim(class) as i128, self.slots as i128)
    }

    /// Bits per channel use.
    pub fn bit_rate(&self, class: MessageClass) -> Rational {
        self.symbol_rate(class) * int(self.params.field().degree() as i128)
    }

    /// Symbols per channel use divided by n.
    pub fn normalized_rate(&self, class: MessageClass) -> Rational {
        frac(
            self.dim(class) as i128,
            (self.slots * self.params.n()) as i128,
        )
    }

    pub fn rate_point(&self, setup: Setup) -> RatePoint {
        let (x, y) = setup.axes();
        RatePoint::new(self.normalized_rate(x), self.normalized_rate(y))
    }

    /// Copy with one user's generator for (subcarrier, class) replaced.
    pub fn with_generator(
        &self,
        user: usize,
        subcarrier: usize,
        class: MessageClass,
        g: Matrix,
    ) -> Result<Self> {
        let mut generators = self.generators.clone();
        generators[user][subcarrier][class.index()] = g;
        LinearScheme::new(self.params, self.slots, self.dims, generators)
    }

    /// Plain-text serialization; see the crate README for the format.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let width = hex_width(p.field());
        let mut out = String::new();
        out.push_str("bic-scheme 1\n");
        out.push_str(&format!("field-degree {}\n", p.field().degree()));
        out.push_str(&format!(
            "channel n={} k={} M={} L={}\n",
            p.n(),
            p.k(),
            p.subcarriers(),
            p.interfered()
        ));
        out.push_str(&format!("slots {}\n", self.slots));
        out.push_str(&format!(
            "dims {} {} {}\n",
            self.dims[0], self.dims[1], self.dims[2]
        ));
        for (u, user) in self.generators.iter().enumerate() {
            for (j, per_class) in user.iter().enumerate() {
                for class in MessageClass::ALL {
                    let g = &per_class[class.index()];
                    out.push_str(&format!(
                        "gen user={} sub={} class={} rows={} cols={}\n",
                        u + 1,
                        j + 1,
                        class.name(),
                        g.rows(),
                        g.cols()
                    ));
                    if g.cols() == 0 {
                        continue;
                    }
                    for r in 0..g.rows() {
                        let row: Vec<String> =
                            g.row(r).iter().map(|v| format!("{v:0width$x}")).collect();
                        out.push_str(&row.join(" "));
                        out.push('\n');
                    }
                }
            }
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        SchemeParser::new(text).parse()
    }
}

fn hex_width(field: Field) -> usize {
    (field.degree() as usize).div_ceil(4)
}

struct SchemeParser<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> SchemeParser<'a> {
    fn new(text: &'a str) -> Self {
        SchemeParser {
            lines: text.lines().enumerate().peekable(),
        }
    }

    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        for (i, line) in self.lines.by_ref() {
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Ok((i + 1, t));
            }
        }
        Err(Error::Parse {
            line: 0,
            msg: "unexpected end of input".into(),
        })
    }

    fn keyword(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        let (line, text) = self.next_line()?;
        let mut parts = text.split_whitespace();
        if parts.next() != Some(key) {
            return Err(Error::Parse {
                line,
                msg: format!("expected `{key}`, found {text:?}"),
            });
        }
        Ok((line, parts.collect()))
    }

    fn parse(mut self) -> Result<LinearScheme> {
        let (line, v) = self.keyword("bic-scheme")?;
        if v != ["1"] {
            return Err(Error::Parse {
                line,
                msg: format!("unsupported version {v:?}"),
            });
        }
        let (line, v) = self.keyword("field-degree")?;
        let degree: u8 = parse_num(line, v.first().copied())?;
        let (line, v) = self.keyword("channel")?;
        let kv = key_values(line, &v)?;
        let get = |k: &str| -> Result<usize> {
            kv.iter()
                .find(|(key, _)| *key == k)
                .map(|(_, val)| *val)
                .ok_or_else(|| Error::Parse {
                    line,
                    msg: format!("missing {k}="),
                })
                .and_then(|val| parse_num(line, Some(val)))
        };
        let params = ChannelParams::new(get("n")?, get("k")?, get("M")?, get("L")?, degree)?;
        let (line, v) = self.keyword("slots")?;
        let slots: usize = parse_num(line, v.first().copied())?;
        let (line, v) = self.keyword("dims")?;
        if v.len() != 3 {
            return Err(Error::Parse {
                line,
                msg: "dims needs three counts".into(),
            });
        }
        let dims = [
            parse_num(line, Some(v[0]))?,
            parse_num(line, Some(v[1]))?,
            parse_num(line, Some(v[2]))?,
        ];
        let field = params.field();
        let rows = params.q() * slots;
        let empty = || -> [Matrix; 3] {
            [0, 1, 2].map(|c| Matrix::zeros(field, rows, dims[c]))
        };
        let mut generators: [Vec<[Matrix; 3]>; 2] = [
            (0..params.subcarriers()).map(|_| empty()).collect(),
            (0..params.subcarriers()).map(|_| empty()).collect(),
        ];
        loop {
            let (line, text) = self.next_line()?;
            if text == "end" {
                break;
            }
            let mut parts = text.split_whitespace();
            if parts.next() != Some("gen") {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected `gen` or `end`, found {text:?}"),
                });
            }
            let parts: Vec<&str> = parts.collect();
            let kv = key_values(line, &parts)?;
            let find = |k: &str| -> Result<&str> {
                kv.iter()
                    .find(|(key, _)| *key == k)
                    .map(|(_, v)| *v)
                    .ok_or_else(|| Error::Parse {
                        line,
                        msg: format!("missing {k}="),
                    })
            };
            let user: usize = parse_num(line, Some(find("user")?))?;
            let sub: usize = parse_num(line, Some(find("sub")?))?;
            let class: MessageClass = find("class")?.parse().map_err(|_| Error::Parse {
                line,
                msg: "bad class".into(),
            })?;
            let grows: usize = parse_num(line, Some(find("rows")?))?;
            let gcols: usize = parse_num(line, Some(find("cols")?))?;
            if !(1..=2).contains(&user) || sub == 0 || sub > params.subcarriers() {
                return Err(Error::Parse {
                    line,
                    msg: format!("user {user} / subcarrier {sub} out of range"),
                });
            }
            if grows != rows || gcols != dims[class.index()] {
                return Err(Error::Parse {
                    line,
                    msg: format!(
                        "block is {grows}x{gcols}, expected {rows}x{}",
                        dims[class.index()]
                    ),
                });
            }
            let mut data = Vec::with_capacity(grows * gcols);
            if gcols > 0 {
                for _ in 0..grows {
                    let (line, text) = self.next_line()?;
                    let row: Vec<u16> = text
                        .split_whitespace()
                        .map(|h| {
                            u16::from_str_radix(h, 16).map_err(|_| Error::Parse {
                                line,
                                msg: format!("bad hex entry {h:?}"),
                            })
                        })
                        .collect::<Result<_>>()?;
                    if row.len() != gcols {
                        return Err(Error::Parse {
                            line,
                            msg: format!("row has {} entries, expected {gcols}", row.len()),
                        });
                    }
                    data.extend(row);
                }
            }
            generators[user - 1][sub - 1][class.index()] =
                Matrix::from_vec(field, grows, gcols, data).map_err(|e| Error::Parse {
                    line,
                    msg: e.to_string(),
                })?;
        }
        LinearScheme::new(params, slots, dims, generators)
    }
}

fn parse_num<T: FromStr>(line: usize, s: Option<&str>) -> Result<T> {
    s.and_then(|s| s.parse().ok()).ok_or_else(|| Error::Parse {
        line,
        msg: format!("expected a number, found {s:?}"),
    })
}

fn key_values<'a>(line: usize, parts: &[&'a str]) -> Result<Vec<(&'a str, &'a str)>> {
    parts
        .iter()
        .map(|p| {
            p.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected key=value, found {p:?}"),
            })
        })
        .collect()
}

/// Accumulates generator entries while message symbols are allocated.
struct SchemeBuilder {
    params: ChannelParams,
    slots: usize,
    dims: [usize; 3],
    // [user][subcarrier][class] -> (row, col, value)
    entries: [Vec<[Vec<Entry>; 3]>; 2],
}

type Entry = (usize, usize, u16);

impl SchemeBuilder {
    fn new(params: ChannelParams, slots: usize) -> Self {
        let m = params.subcarriers();
        let per_user = || (0..m).map(|_| [Vec::new(), Vec::new(), Vec::new()]).collect();
        SchemeBuilder {
            params,
            slots,
            dims: [0; 3],
            entries: [per_user(), per_user()],
        }
    }

    fn alloc(&mut self, class: MessageClass, count: usize) -> usize {
        let start = self.dims[class.index()];
        self.dims[class.index()] += count;
        start
    }

    fn put(&mut self, user: usize, sub: usize, class: MessageClass, row: usize, col: usize, v: u16) {
        if v != 0 {
            self.entries[user][sub][class.index()].push((row, col, v));
        }
    }

    fn row(&self, slot: usize, level: usize) -> usize {
        slot * self.params.q() + level
    }

    /// A fresh symbol on every listed level of every subcarrier and slot,
    /// for both users.
    fn uncoded(&mut self, levels: Range<usize>, class: MessageClass) {
        self.uncoded_on(levels, class, 0..self.params.subcarriers(), [true, true]);
    }

    fn uncoded_on(
        &mut self,
        levels: Range<usize>,
        class: MessageClass,
        subs: Range<usize>,
        users: [bool; 2],
    ) {
        for sub in subs {
            for t in 0..self.slots {
                for lvl in levels.clone() {
                    let col = self.alloc(class, 1);
                    let row = self.row(t, lvl);
                    for (user, _) in users.iter().enumerate().filter(|(_, &on)| on) {
                        self.put(user, sub, class, row, col, 1);
                    }
                }
            }
        }
    }

    /// Per level and slot, `M-L` symbols spread across the subcarriers by
    /// the MDS generator.
    fn erasure(&mut self, levels: Range<usize>, class: MessageClass) -> Result<()> {
        if levels.is_empty() {
            return Ok(());
        }
        let p = self.params;
        let mds = mds_generator(p.subcarriers(), p.interfered(), p.field())?;
        for t in 0..self.slots {
            for lvl in levels.clone() {
                let start = self.alloc(class, mds.cols());
                let row = self.row(t, lvl);
                for sub in 0..p.subcarriers() {
                    for c in 0..mds.cols() {
                        let v = mds.get(sub, c);
                        for user in 0..2 {
                            self.put(user, sub, class, row, start + c, v);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `count` fresh symbols per subcarrier, each user drawing its own
    /// dense block over `rows` (shared by all of its subcarriers).
    fn random_blocks(
        &mut self,
        class: MessageClass,
        rows: &[usize],
        count: usize,
        rng: &mut ChaCha8Rng,
    ) {
        let field = self.params.field();
        let blocks: Vec<Matrix> = (0..2)
            .map(|_| Matrix::random(field, rows.len(), count, rng))
            .collect();
        for sub in 0..self.params.subcarriers() {
            let start = self.alloc(class, count);
            for (user, block) in blocks.iter().enumerate() {
                for (i, &row) in rows.iter().enumerate() {
                    for c in 0..count {
                        self.put(user, sub, class, row, start + c, block.get(i, c));
                    }
                }
            }
        }
    }

    fn finish(self) -> Result<LinearScheme> {
        let field = self.params.field();
        let rows = self.params.q() * self.slots;
        let dims = self.dims;
        let generators = self.entries.map(|user| {
            user.into_iter()
                .map(|per_class| {
                    let mut c = 0;
                    per_class.map(|entries| {
                        let mut g = Matrix::zeros(field, rows, dims[c]);
                        for (r, col, v) in entries {
                            g.set(r, col, v);
                        }
                        c += 1;
                        g
                    })
                })
                .collect()
        });
        LinearScheme::new(self.params, self.slots, dims, generators)
    }
}

/// Builds and certifies the scheme for `corner` on instance `p`.
///
/// `seed` drives the randomized families; the deterministic families ignore
/// it. The returned scheme passes [`verifier::verify`] and its normalized
/// rate pair equals [`Corner::rate`] exactly.
pub fn build_corner_scheme(p: &ChannelParams, corner: Corner, seed: u64) -> Result<LinearScheme> {
    let alpha = p.alpha();
    if !corner.applies(alpha) {
        return Err(Error::RegimeMismatch {
            corner: corner.to_string(),
            alpha: rational::format(&alpha),
        });
    }
    let scheme = match corner.kind {
        CornerKind::HanKobayashi
        | CornerKind::HanKobayashiBase
        | CornerKind::StrongOrthogonal
        | CornerKind::StrongOrthogonalBase => {
            let mut found = None;
            for attempt in 0..MAX_RETRIES {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
                let s = build_randomized(p, corner, &mut rng)?;
                if verifier::verify(&s).passed() {
                    found = Some(s);
                    break;
                }
            }
            found.ok_or_else(|| Error::ConstructionFailed(corner.to_string()))?
        }
        _ => {
            let s = build_deterministic(p, corner)?;
            if !verifier::verify(&s).passed() {
                return Err(Error::ConstructionFailed(corner.to_string()));
            }
            s
        }
    };
    let expected = corner.rate(p.subcarriers(), p.interfered(), alpha);
    let got = scheme.rate_point(corner.setup);
    if got != expected {
        return Err(Error::ConstructionFailed(format!(
            "{corner}: built rate {got} differs from {expected}"
        )));
    }
    Ok(scheme)
}

fn build_deterministic(p: &ChannelParams, corner: Corner) -> Result<LinearScheme> {
    use CornerKind as K;
    use MessageClass::{WL, WM, W0};
    let a = p.alpha();
    let n = p.n();
    let mut b = SchemeBuilder::new(*p, 1);
    match (corner.setup, corner.kind) {
        (Setup::R0RL, K::TopLevels) => b.uncoded(0..n, W0),
        (setup, K::PrivateSplit) => {
            let top = p.levels(int(1) - a, "(1-alpha)n")?;
            if setup == Setup::R0RL {
                b.uncoded(0..top, WL);
                b.uncoded(top..n, W0);
            } else {
                b.uncoded(0..top, WM);
                b.erasure(top..n, WL)?;
            }
        }
        (_, K::ErasureAll) => {
            let top = p.levels(int(1) - a, "(1-alpha)n")?;
            b.uncoded(0..top, WL);
            b.erasure(top..n, WL)?;
        }
        (setup, K::Alignment) => {
            let bands = alignment_bands(p)?;
            let clean = if setup == Setup::R0RL { WL } else { WM };
            b.uncoded(bands.band(0), clean);
            b.uncoded(bands.band(3), clean);
            if setup == Setup::R0RL {
                b.uncoded(bands.band(2), W0);
            } else {
                b.erasure(bands.band(2), WL)?;
            }
        }
        (_, K::AlignmentErasure) => {
            let bands = alignment_bands(p)?;
            b.uncoded(bands.band(0), WL);
            b.uncoded(bands.band(3), WL);
            b.erasure(bands.band(2), WL)?;
        }
        (setup, K::StrongAlign) => {
            let top = p.levels(int(2) - a, "(2-alpha)n")?;
            if setup == Setup::R0RL {
                b.uncoded(0..top, W0);
                b.uncoded(top..n, WL);
            } else {
                b.erasure(0..top, WL)?;
                b.uncoded(top..n, WM);
            }
        }
        (_, K::StrongAlignErasure) => {
            let top = p.levels(int(2) - a, "(2-alpha)n")?;
            b.erasure(0..top, WL)?;
            b.uncoded(top..n, WL);
        }
        _ => unreachable!("randomized families are built elsewhere"),
    }
    b.finish()
}

fn randomized_class(corner: Corner) -> MessageClass {
    match corner.kind {
        CornerKind::HanKobayashiBase | CornerKind::StrongOrthogonalBase => MessageClass::WM,
        _ => MessageClass::WL,
    }
}

fn build_randomized(p: &ChannelParams, corner: Corner, rng: &mut ChaCha8Rng) -> Result<LinearScheme> {
    let class = randomized_class(corner);
    let (n, k, q) = (p.n(), p.k(), p.q());
    let slots = 2;
    let mut b = SchemeBuilder::new(*p, slots);
    match corner.kind {
        CornerKind::HanKobayashi | CornerKind::HanKobayashiBase => {
            // Private symbols sit below the other receiver's view; the
            // common part mixes the top k levels of both slots.
            b.uncoded(k..n, class);
            let rows: Vec<usize> = (0..slots).flat_map(|t| (0..k).map(move |l| t * q + l)).collect();
            b.random_blocks(class, &rows, k, rng);
        }
        _ => {
            // k symbols per two slots over the n levels the own receiver sees.
            let rows: Vec<usize> = (0..slots).flat_map(|t| (0..n).map(move |l| t * q + l)).collect();
            b.random_blocks(class, &rows, k, rng);
        }
    }
    b.finish()
}

/// Subcarrier split between the users: user 1 transmits `class` uncoded on
/// the top n levels of subcarriers 1..M/2, user 2 on the rest. Neither user
/// ever sees interference on a subcarrier it uses.
pub fn split_scheme(p: &ChannelParams, class: MessageClass) -> Result<LinearScheme> {
    let m = p.subcarriers();
    if !m.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!(
            "an even subcarrier split needs even M, got {m}"
        )));
    }
    let half = m / 2;
    let n = p.n();
    let mut b = SchemeBuilder::new(*p, 1);
    let before = b.dims[class.index()];
    b.uncoded_on(0..n, class, 0..half, [true, false]);
    let user1 = b.dims[class.index()] - before;
    // Reuse the same symbol indices for user 2 so both carry user1 symbols.
    b.dims[class.index()] = before;
    b.uncoded_on(0..n, class, half..m, [false, true]);
    debug_assert_eq!(b.dims[class.index()] - before, user1);
    b.finish()
}
