//! Run configuration: suites, diagram selection, evaluation points, and the
//! key-value file format that mirrors the command-line flags.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use wsuper::exactnum::{parse_rat, rat, BigRat, EvalPoint};
use wsuper::exec::Exec;
use wsuper::superdynkin::LabelRule;

/// Environment variable holding the worker count; `1` runs sequentially.
pub const WORKERS_ENV: &str = "WSUPER_WORKERS";

/// One verification suite. The declaration order is the execution order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Diagram,
    Params,
    Locality,
    Screening,
    Vertex,
    Fusion,
    Exchange,
    Quadratic,
    Oracle,
    Poisson,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Diagram,
        Suite::Params,
        Suite::Locality,
        Suite::Screening,
        Suite::Vertex,
        Suite::Fusion,
        Suite::Exchange,
        Suite::Quadratic,
        Suite::Oracle,
        Suite::Poisson,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Diagram => "diagram",
            Suite::Params => "params",
            Suite::Locality => "locality",
            Suite::Screening => "screening",
            Suite::Vertex => "vertex",
            Suite::Fusion => "fusion",
            Suite::Exchange => "exchange",
            Suite::Quadratic => "quadratic",
            Suite::Oracle => "oracle",
            Suite::Poisson => "poisson",
        }
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s.trim()).ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Which fundamental systems of `A(M,N)` to run on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DiagramSel {
    #[default]
    Standard,
    /// Position in the enumeration order of `enumerate_systems`.
    Index(usize),
    All,
}

impl fmt::Display for DiagramSel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramSel::Standard => write!(f, "standard"),
            DiagramSel::Index(k) => write!(f, "{k}"),
            DiagramSel::All => write!(f, "all"),
        }
    }
}

impl FromStr for DiagramSel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "standard" => Ok(DiagramSel::Standard),
            "all" => Ok(DiagramSel::All),
            t => t.parse().map(DiagramSel::Index).map_err(|_| format!("bad diagram selector `{s}`")),
        }
    }
}

impl Serialize for DiagramSel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DiagramSel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Output format.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    /// Pretty-printed JSON.
    Structured,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "text" => Ok(Format::Text),
            "structured" | "json" => Ok(Format::Structured),
            _ => Err(format!("unknown format `{s}`")),
        }
    }
}

/// Parse a label rule name.
pub fn parse_rule(s: &str) -> Result<LabelRule, String> {
    match s.trim() {
        "epsilon" | "epsilon-edges" => Ok(LabelRule::EpsilonEdges),
        "cardinality" => Ok(LabelRule::Cardinality),
        _ => Err(format!("unknown label rule `{s}`")),
    }
}

/// Parse `t:p:q`, e.g. `2/3:3:2`.
pub fn parse_point(s: &str) -> Result<EvalPoint, String> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    let [t, p, q] = parts[..] else {
        return Err(format!("evaluation point `{s}` is not of the form t:p:q"));
    };
    let t = parse_rat(t).ok_or_else(|| format!("bad rational `{t}`"))?;
    let p: i64 = p.trim().parse().map_err(|_| format!("bad integer `{p}`"))?;
    let q: i64 = q.trim().parse().map_err(|_| format!("bad integer `{q}`"))?;
    EvalPoint::new(t, p, q).map_err(|e| e.to_string())
}

/// Parse a comma- or semicolon-separated list of points.
pub fn parse_points(s: &str) -> Result<Vec<EvalPoint>, String> {
    s.split([',', ';']).filter(|x| !x.trim().is_empty()).map(parse_point).collect()
}

/// Parse `i,j`.
pub fn parse_pair(s: &str) -> Result<(u32, u32), String> {
    let (i, j) = s.split_once(',').ok_or_else(|| format!("relation `{s}` is not of the form i,j"))?;
    let i = i.trim().parse().map_err(|_| format!("bad index `{i}`"))?;
    let j = j.trim().parse().map_err(|_| format!("bad index `{j}`"))?;
    Ok((i, j))
}

/// Parse `1,1;1,2` into pairs.
pub fn parse_pairs(s: &str) -> Result<Vec<(u32, u32)>, String> {
    s.split(';').filter(|x| !x.trim().is_empty()).map(parse_pair).collect()
}

fn render_point(p: &EvalPoint) -> String {
    format!("{}:{}:{}", p.t, p.p, p.q)
}

mod point_list {
    use super::*;
    pub fn serialize<S: serde::Serializer>(v: &[EvalPoint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(render_point))
    }
    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<EvalPoint>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|p| parse_point(p).map_err(serde::de::Error::custom)).collect()
    }
}

/// Everything a run depends on. The serialized form is echoed into the
/// report; format and worker count are left out since they do not change
/// the results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub m: usize,
    pub n: usize,
    pub diagrams: DiagramSel,
    pub suites: Vec<Suite>,
    /// Series order and largest mode checked.
    pub k: i64,
    /// Largest total degree `i + j` of a relation.
    pub cap: u32,
    #[serde(with = "point_list")]
    pub points: Vec<EvalPoint>,
    pub rule: LabelRule,
    /// Relations `(i, j)`; empty means every `i ≤ j` with `i + j ≤ cap`.
    pub relations: Vec<(u32, u32)>,
    /// Fock cutoff degree and mode window of the oracle.
    pub oracle_degree: u32,
    pub oracle_window: u32,
    /// Second indices `j` of the oracle's `(1, j)` relations.
    pub oracle_relations: Vec<u32>,
    pub poisson_max_ij: u32,
    pub poisson_modes: i64,
    /// `q^{1/2}` of the classical-limit check.
    #[serde(with = "wsuper::exactnum::rat_string")]
    pub poisson_sqrt_q: BigRat,
    pub seed: u64,
    /// Random points appended to `points`, drawn from `seed`.
    pub random_points: usize,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            m: 1,
            n: 0,
            diagrams: DiagramSel::Standard,
            suites: Suite::ALL.to_vec(),
            k: 24,
            cap: 4,
            points: EvalPoint::defaults(),
            rule: LabelRule::EpsilonEdges,
            relations: Vec::new(),
            oracle_degree: 3,
            oracle_window: 3,
            oracle_relations: vec![1],
            poisson_max_ij: 2,
            poisson_modes: 4,
            poisson_sqrt_q: rat(3, 2),
            seed: 0,
            random_points: 0,
            format: Format::Text,
            exec: Exec::default(),
        }
    }
}

impl RunConfig {
    /// Check the invariants of a configuration.
    pub fn validate(&self) -> Result<(), String> {
        if self.m + self.n < 1 {
            return Err("need M + N >= 1".into());
        }
        if self.k < 4 {
            return Err(format!("K = {} must be at least 4", self.k));
        }
        if self.cap < 2 {
            return Err(format!("cap = {} must be at least 2", self.cap));
        }
        if self.points.is_empty() {
            return Err("at least one evaluation point is required".into());
        }
        for p in &self.points {
            EvalPoint::new(p.t.clone(), p.p, p.q).map_err(|e| e.to_string())?;
        }
        for &(i, j) in &self.relations {
            if i < 1 || j < 1 || i + j > self.cap {
                return Err(format!("relation ({i},{j}) needs i, j >= 1 and i + j <= cap = {}", self.cap));
            }
        }
        if self.oracle_window > self.oracle_degree {
            return Err("oracle window exceeds the oracle degree".into());
        }
        if self.oracle_relations.contains(&0) {
            return Err("oracle relations need j >= 1".into());
        }
        let s = &self.poisson_sqrt_q;
        if !s.is_positive() || s.pow(2) == BigRat::from(1) {
            return Err("the q-Poisson check needs q > 0 and q != 1".into());
        }
        Ok(())
    }

    /// The relation list with the default filled in.
    pub fn relation_list(&self) -> Vec<(u32, u32)> {
        if !self.relations.is_empty() {
            return self.relations.clone();
        }
        let mut out = Vec::new();
        for i in 1..self.cap {
            for j in i..=self.cap - i {
                out.push((i, j));
            }
        }
        out
    }

    /// Sorted, deduplicated suites in execution order.
    pub fn ordered_suites(&self) -> Vec<Suite> {
        let mut s = self.suites.clone();
        s.sort();
        s.dedup();
        s
    }

    /// Append `random_points` points drawn from `seed`, then clear the count
    /// so that applying it twice is harmless.
    pub fn materialize_random_points(&mut self) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.random_points {
            loop {
                let den: i64 = rng.gen_range(2..=9);
                let num: i64 = rng.gen_range(1..den);
                let q: i64 = rng.gen_range(1..=4);
                let p: i64 = rng.gen_range(q + 1..=q + 4);
                if let Ok(pt) = EvalPoint::new(rat(num, den), p, q) {
                    self.points.push(pt);
                    break;
                }
            }
        }
        self.random_points = 0;
    }
}

/// Worker count from [`WORKERS_ENV`], if set and valid.
pub fn workers_from_env() -> Result<Option<usize>, String> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n >= 1)
            .map(Some)
            .ok_or_else(|| format!("{WORKERS_ENV} = `{v}` is not a positive integer")),
        Err(_) => Ok(None),
    }
}

/// Contents of a `--config` file: the same keys as the long flags.
///
/// ```toml
/// M = 1
/// N = 0
/// suite = ["quadratic", "fusion"]
/// ij = "1,1;1,2"
/// points = "2/3:3:2, 1/2:2:1"
/// ```
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    #[serde(rename = "M", alias = "m")]
    pub m: Option<usize>,
    #[serde(rename = "N", alias = "n")]
    pub n: Option<usize>,
    pub diagrams: Option<String>,
    pub suite: Option<Vec<String>>,
    pub k: Option<i64>,
    pub cap: Option<u32>,
    pub points: Option<String>,
    pub rule: Option<String>,
    pub ij: Option<String>,
    pub degree: Option<u32>,
    pub window: Option<u32>,
    pub j: Option<Vec<u32>>,
    pub max_ij: Option<u32>,
    pub modes: Option<i64>,
    pub sqrt_q: Option<String>,
    pub seed: Option<u64>,
    pub random_points: Option<usize>,
    pub format: Option<String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Overwrite the fields of `c` that the file sets.
    pub fn apply(&self, c: &mut RunConfig) -> Result<(), String> {
        if let Some(v) = self.m {
            c.m = v;
        }
        if let Some(v) = self.n {
            c.n = v;
        }
        if let Some(v) = &self.diagrams {
            c.diagrams = v.parse()?;
        }
        if let Some(v) = &self.suite {
            c.suites = v.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
        }
        if let Some(v) = self.k {
            c.k = v;
        }
        if let Some(v) = self.cap {
            c.cap = v;
        }
        if let Some(v) = &self.points {
            c.points = parse_points(v)?;
        }
        if let Some(v) = &self.rule {
            c.rule = parse_rule(v)?;
        }
        if let Some(v) = &self.ij {
            c.relations = parse_pairs(v)?;
        }
        if let Some(v) = self.degree {
            c.oracle_degree = v;
            c.oracle_window = c.oracle_window.min(v);
        }
        if let Some(v) = self.window {
            c.oracle_window = v;
        }
        if let Some(v) = &self.j {
            c.oracle_relations = v.clone();
        }
        if let Some(v) = self.max_ij {
            c.poisson_max_ij = v;
        }
        if let Some(v) = self.modes {
            c.poisson_modes = v;
        }
        if let Some(v) = &self.sqrt_q {
            c.poisson_sqrt_q = parse_rat(v).ok_or_else(|| format!("bad rational `{v}`"))?;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.random_points {
            c.random_points = v;
        }
        if let Some(v) = &self.format {
            c.format = v.parse()?;
        }
        Ok(())
    }
}
