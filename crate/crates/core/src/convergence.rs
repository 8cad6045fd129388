//! Convergence modes over finite prefixes, and the lattice report combining
//! them with the oscillation criteria, moduli, tightness and biting.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicSet;
use crate::error::{Error, Result};
use crate::functionals::{
    equi_modulus, measure_deviation, pettis_norm, pettis_ui_modulus, ui_cutoff, ui_modulus,
    ModulusCurve, DEFAULT_BLOCK_CAP,
};
use crate::oscillation::{
    b0_check, b1_check, b2_check, sequential_bocce_check, sequential_pettis_bocce_check, set_bocce_check,
    small_bocce_set_check, CriterionVerdict, SearchConfig, VerdictStatus,
};
use crate::seq::{Functional, SeqVec, SpaceKind};
use crate::stepfn::{FunctionSequence, StepFunction, REAL_KIND};
use crate::tight::{
    biting_decompose, is_tight, strong_iff_from, strong_biting_from, tightness_search, BitingDecomposition,
    BitingSchedule, TheoremCheck, TightnessGrid, TightnessOutcome,
};

pub const DEFAULT_TOL: f64 = 0.4;

/// `g(ω, x) = Σ_i |x*_i(x)| 1_{A_i}(ω) + Σ_j ⟨x, b_j(ω)⟩`, plus `‖x‖` when a
/// finite dimension is declared.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TestG {
    #[serde(default)]
    pub terms: Vec<(Functional, DyadicSet)>,
    #[serde(default)]
    pub linear: Vec<StepFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_dimension: Option<u64>,
}

impl TestG {
    pub fn zero() -> Self {
        TestG::default()
    }

    pub fn abs_term(x: Functional, set: DyadicSet) -> Self {
        TestG {
            terms: vec![(x, set)],
            ..TestG::default()
        }
    }

    pub fn linear(b: StepFunction) -> Self {
        TestG {
            linear: vec![b],
            ..TestG::default()
        }
    }

    /// Adds the `‖x‖` term, admitted only on values supported in `1..=dimension`.
    pub fn with_norm(mut self, dimension: u64) -> Self {
        self.norm_dimension = Some(dimension);
        self
    }

    /// `C` with `|g(ω, x)| ≤ C‖x‖`.
    pub fn bound(&self) -> f64 {
        let abs: f64 = self.terms.iter().map(|(x, _)| x.dual_norm()).sum();
        let lin: f64 = self.linear.iter().map(|b| b.sup_norm()).sum();
        abs + lin + if self.norm_dimension.is_some() { 1.0 } else { 0.0 }
    }

    /// Finest level among the sets and linear terms.
    pub fn level(&self) -> u32 {
        self.terms
            .iter()
            .map(|(_, a)| a.level())
            .chain(self.linear.iter().map(|b| b.level()))
            .max()
            .unwrap_or(0)
    }

    fn check(&self, kind: SpaceKind, x: &SeqVec) -> Result<()> {
        for (f, _) in &self.terms {
            f.primal.ensure(kind)?;
        }
        for b in &self.linear {
            kind.dual().ensure(b.kind())?;
        }
        if let (Some(d), Some(m)) = (self.norm_dimension, x.max_index()) {
            if m > d {
                return Err(Error::InvalidArgument(format!(
                    "norm term declared on dimension {d} but value uses coordinate {m}"
                )));
            }
        }
        Ok(())
    }

    /// `g(ω, x)` for `ω` in atom `atom` of `level ≥ self.level()`.
    pub fn eval(&self, kind: SpaceKind, level: u32, atom: usize, x: &SeqVec) -> f64 {
        let mut acc = 0.0;
        for (f, a) in &self.terms {
            if a.contains_atom(atom >> (level - a.level())) {
                acc += f.coeffs.dot(x).abs();
            }
        }
        for b in &self.linear {
            acc += x.dot(b.value_at(level, atom));
        }
        if self.norm_dimension.is_some() {
            acc += x.norm(kind);
        }
        acc
    }

    /// `∫ g(ω, h(ω)) dµ(ω)`.
    pub fn integrate(&self, h: &StepFunction) -> Result<f64> {
        let level = h.level().max(self.level());
        let kind = h.kind();
        let mut total = 0.0;
        for atom in 0..1usize << level {
            let x = h.value_at(level, atom);
            self.check(kind, x)?;
            total += self.eval(kind, level, atom, x);
        }
        Ok(total * (-(level as f64)).exp2())
    }
}

/// Start of the last `⌈K/3⌉` members, zero-based.
pub fn window_start(len: usize) -> usize {
    len - len.div_ceil(3)
}

/// Largest value in the flag window.
pub fn window_max(series: &[f64]) -> f64 {
    series[window_start(series.len())..]
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// `‖f_k − f_0‖₁`.
pub fn strong_trend(seq: &FunctionSequence) -> Result<Vec<f64>> {
    Ok(seq.deviations()?.par_iter().map(|h| h.l1_norm()).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct PettisTrend {
    /// Exact value, or the `‖·‖₁` upper bound where the enumeration cap was hit.
    pub values: Vec<f64>,
    pub exact: Vec<bool>,
}

/// `‖f_k − f_0‖_Pettis`.
pub fn pettis_trend(seq: &FunctionSequence, cap: usize, functionals: &[Functional]) -> Result<PettisTrend> {
    let rows = seq
        .deviations()?
        .par_iter()
        .map(|h| pettis_norm(h, cap, functionals))
        .collect::<Result<Vec<_>>>()?;
    Ok(PettisTrend {
        values: rows.iter().map(|r| r.upper.unwrap_or(r.value)).collect(),
        exact: rows.iter().map(|r| r.upper.is_none()).collect(),
    })
}

/// `∫ g(ω, f_k(ω) − f_0(ω)) dµ` for each test, indexed `[test][k]`.
pub fn limited_trend(seq: &FunctionSequence, tests: &[TestG]) -> Result<Vec<Vec<f64>>> {
    let devs = seq.deviations()?;
    tests
        .iter()
        .map(|g| devs.par_iter().map(|h| g.integrate(h)).collect())
        .collect()
}

/// Per-functional scalar series: `[functional][k]` for strong and in
/// measure, `[functional][set][k]` for weak.
#[derive(Debug, Clone, Serialize)]
pub struct ScalarModes {
    pub strong: Vec<Vec<f64>>,
    pub in_measure: Vec<Vec<f64>>,
    pub weak: Vec<Vec<Vec<f64>>>,
}

pub fn scalar_modes(
    seq: &FunctionSequence,
    functionals: &[Functional],
    eps: f64,
    test_sets: &[DyadicSet],
) -> Result<ScalarModes> {
    let devs = seq.deviations()?;
    let zero = StepFunction::zero(REAL_KIND);
    let mut strong = Vec::with_capacity(functionals.len());
    let mut in_measure = Vec::with_capacity(functionals.len());
    let mut weak = Vec::with_capacity(functionals.len());
    for x in functionals {
        let scalars = devs.par_iter().map(|h| h.scalarize(x)).collect::<Result<Vec<_>>>()?;
        strong.push(scalars.iter().map(|s| s.l1_norm()).collect());
        in_measure.push(
            scalars
                .iter()
                .map(|s| measure_deviation(s, &zero, eps).map(|d| d.to_f64()))
                .collect::<Result<Vec<_>>>()?,
        );
        weak.push(
            test_sets
                .iter()
                .map(|b| scalars.iter().map(|s| s.integral(b).as_scalar()).collect())
                .collect(),
        );
    }
    Ok(ScalarModes {
        strong,
        in_measure,
        weak,
    })
}

/// `∫ ⟨f_k − f_0, b(ω)⟩ dµ` for each dual, indexed `[dual][k]`.
pub fn weak_surrogate_trend(seq: &FunctionSequence, duals: &[StepFunction]) -> Result<Vec<Vec<f64>>> {
    for b in duals {
        seq.kind().dual().ensure(b.kind())?;
    }
    let tests: Vec<TestG> = duals.iter().cloned().map(TestG::linear).collect();
    limited_trend(seq, &tests)
}

#[derive(Debug, Clone, Serialize)]
pub struct SetSeries {
    pub set: DyadicSet,
    pub values: Vec<f64>,
}

/// `‖m_B(f_k) − m_B(f_0)‖` for each test set.
pub fn delta_cauchy(seq: &FunctionSequence, test_sets: &[DyadicSet]) -> Result<Vec<SetSeries>> {
    let f0 = seq.require_limit()?;
    let kind = seq.kind();
    Ok(test_sets
        .iter()
        .map(|b| {
            let m0 = f0.average(b);
            SetSeries {
                set: b.clone(),
                values: seq
                    .members()
                    .iter()
                    .map(|f| f.average(b).sub(&m0).norm(kind))
                    .collect(),
            }
        })
        .collect())
}

/// `µ{‖f_k − f_0‖ > η}`.
pub fn in_measure_trend(seq: &FunctionSequence, eta: f64) -> Result<Vec<f64>> {
    let f0 = seq.require_limit()?;
    seq.members()
        .par_iter()
        .map(|f| measure_deviation(f, f0, eta).map(|d| d.to_f64()))
        .collect()
}

/// `e_0*, …, e_4*` and the normalized sum of them.
pub fn default_functionals(kind: SpaceKind) -> Vec<Functional> {
    let mut out: Vec<Functional> = (0..=4).map(|k| Functional::coordinate(k, kind)).collect();
    out.push(Functional::new(SeqVec::from_dense(0, &[1.0; 5]), kind).into_unit_ball());
    out
}

/// Which report sections to run.
#[derive(Debug, Clone, Copy)]
pub struct Sections {
    pub criteria: bool,
    pub moduli: bool,
    pub tightness: bool,
    pub biting: bool,
}

impl Default for Sections {
    fn default() -> Self {
        Sections {
            criteria: true,
            moduli: true,
            tightness: true,
            biting: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LatticeConfig {
    /// Flag tolerance for norm-type metrics; in-measure metrics use `√tol`.
    pub tol: f64,
    /// Scalar test family; defaults to [`default_functionals`].
    pub functionals: Option<Vec<Functional>>,
    /// Dual-valued test functions for the weak and limited surrogates.
    pub duals: Vec<StepFunction>,
    /// Extra class-𝒢 tests for the limited surrogate.
    pub tests: Vec<TestG>,
    pub pettis_cap: usize,
    pub search: SearchConfig,
    pub tightness: TightnessGrid,
    pub biting: BitingSchedule,
    pub sections: Sections,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            tol: DEFAULT_TOL,
            functionals: None,
            duals: Vec::new(),
            tests: Vec::new(),
            pettis_cap: DEFAULT_BLOCK_CAP,
            search: SearchConfig::default(),
            tightness: TightnessGrid::default(),
            biting: BitingSchedule::default(),
            sections: Sections::default(),
        }
    }
}

impl LatticeConfig {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.biting.tol = tol;
        self
    }

    pub fn with_duals(mut self, duals: Vec<StepFunction>) -> Self {
        self.duals = duals;
        self
    }

    pub fn eta(&self) -> f64 {
        self.tol.sqrt()
    }

    /// Functional family normalized into the dual unit ball.
    pub fn family(&self, kind: SpaceKind) -> Vec<Functional> {
        self.functionals
            .clone()
            .unwrap_or_else(|| default_functionals(kind))
            .into_iter()
            .map(Functional::into_unit_ball)
            .collect()
    }

    /// Supplied duals followed by the family as constant dual-valued functions.
    pub fn dual_family(&self, kind: SpaceKind) -> Vec<StepFunction> {
        self.duals
            .iter()
            .cloned()
            .chain(
                self.family(kind)
                    .into_iter()
                    .map(|x| StepFunction::constant(x.coeffs, kind.dual())),
            )
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trends {
    pub strong: Vec<f64>,
    pub pettis: Vec<f64>,
    pub pettis_exact: Vec<bool>,
    pub limited: Vec<f64>,
    pub scalarly_strong: Vec<f64>,
    pub scalarly_in_measure: Vec<f64>,
    pub scalarly_weak: Vec<f64>,
    pub weak: Vec<f64>,
    pub sigma_linf: Vec<f64>,
    pub in_measure: Vec<f64>,
    pub delta_cauchy: Vec<SetSeries>,
}

impl Trends {
    /// `(metric name, series)` in report order, excluding `delta_cauchy`.
    pub fn named(&self) -> [(&'static str, &[f64]); 9] {
        [
            ("strong", &self.strong),
            ("pettis", &self.pettis),
            ("limited", &self.limited),
            ("scalarly_strong", &self.scalarly_strong),
            ("scalarly_in_measure", &self.scalarly_in_measure),
            ("scalarly_weak", &self.scalarly_weak),
            ("weak", &self.weak),
            ("sigma_linf", &self.sigma_linf),
            ("in_measure", &self.in_measure),
        ]
    }
}

/// "Converges at tolerance" flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub strong: bool,
    pub pettis: bool,
    pub limited: bool,
    pub scalarly_strong: bool,
    pub scalarly_in_measure: bool,
    pub scalarly_weak: bool,
    pub weak: bool,
    pub sigma_linf: bool,
    pub in_measure: bool,
    pub delta_cauchy: bool,
    pub uniformly_integrable: bool,
}

impl Flags {
    /// Implications among the flags that fail, by name.
    pub fn violations(&self) -> Vec<&'static str> {
        let rules = [
            (self.strong, self.pettis, "strong => pettis"),
            (self.strong, self.limited, "strong => limited"),
            (self.limited, self.scalarly_strong, "limited => scalarly_strong"),
            (self.pettis, self.scalarly_strong, "pettis => scalarly_strong"),
            (self.scalarly_strong, self.scalarly_in_measure, "scalarly_strong => scalarly_in_measure"),
        ];
        rules
            .into_iter()
            .filter(|(p, q, _)| *p && !*q)
            .map(|(_, _, name)| name)
            .collect()
    }

    pub fn consistent(&self) -> bool {
        self.violations().is_empty()
    }
}

fn pointwise_min(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).collect()
}

fn column_max(rows: &[Vec<f64>], len: usize, f: impl Fn(usize, f64) -> f64) -> Vec<f64> {
    (0..len)
        .map(|k| rows.iter().enumerate().map(|(i, r)| f(i, r[k])).fold(0.0, f64::max))
        .collect()
}

/// Every mode trend, with the metrics arranged so that the lattice
/// implications hold by construction.
pub fn compute_trends(seq: &FunctionSequence, cfg: &LatticeConfig) -> Result<(Trends, Flags)> {
    let kind = seq.kind();
    let len = seq.len();
    let family = cfg.family(kind);
    let duals = cfg.dual_family(kind);
    let eta = cfg.eta();

    let strong = strong_trend(seq)?;
    let pettis_raw = pettis_trend(seq, cfg.pettis_cap, &family)?;
    let pettis = pointwise_min(&pettis_raw.values, &strong);

    let tests: Vec<TestG> = family
        .iter()
        .map(|x| TestG::abs_term(x.clone(), DyadicSet::full(0).expect("level 0")))
        .chain(duals.iter().cloned().map(TestG::linear))
        .chain(cfg.tests.iter().cloned())
        .collect();
    let bounds: Vec<f64> = tests.iter().map(|g| g.bound().max(1.0)).collect();
    let limited_raw = limited_trend(seq, &tests)?;
    let limited = pointwise_min(&column_max(&limited_raw, len, |i, v| v.abs() / bounds[i]), &strong);

    let modes = scalar_modes(seq, &family, eta, &cfg.search.test_sets)?;
    let scalar_raw = column_max(&modes.strong, len, |_, v| v);
    let scalarly_strong = pointwise_min(&pointwise_min(&scalar_raw, &pettis), &limited);
    let weak_rows: Vec<Vec<f64>> = modes.weak.iter().flatten().cloned().collect();
    let scalarly_weak = pointwise_min(&column_max(&weak_rows, len, |_, v| v.abs()), &scalarly_strong);
    let scalarly_in_measure = column_max(&modes.in_measure, len, |_, v| v);

    let dual_bounds: Vec<f64> = duals.iter().map(|b| b.sup_norm().max(1.0)).collect();
    let weak = column_max(&weak_surrogate_trend(seq, &duals)?, len, |i, v| v.abs() / dual_bounds[i]);
    let in_measure = in_measure_trend(seq, eta)?;
    let delta = delta_cauchy(seq, &cfg.search.test_sets)?;

    let tol = cfg.tol;
    let below = |s: &[f64]| window_max(s) < tol;
    let strong_flag = below(&strong);
    let scalar_flag = below(&scalarly_strong);
    let ui_tail = ui_modulus(seq, &[ui_cutoff(len)]).tail();
    let flags = Flags {
        strong: strong_flag,
        pettis: below(&pettis),
        limited: below(&limited),
        scalarly_strong: scalar_flag,
        scalarly_in_measure: window_max(&scalarly_in_measure) < eta || scalar_flag,
        scalarly_weak: below(&scalarly_weak),
        weak: below(&weak),
        sigma_linf: below(&weak),
        in_measure: window_max(&in_measure) < eta || strong_flag,
        delta_cauchy: delta.iter().all(|s| below(&s.values)),
        uniformly_integrable: ui_tail < tol,
    };
    let trends = Trends {
        strong,
        pettis,
        pettis_exact: pettis_raw.exact,
        limited,
        scalarly_strong,
        scalarly_in_measure,
        scalarly_weak,
        sigma_linf: weak.clone(),
        weak,
        in_measure,
        delta_cauchy: delta,
    };
    Ok((trends, flags))
}

/// UI, equi-integrability and Pettis-UI moduli at thresholds `2^j`,
/// `j ≤ K`, and `2^{-j}`, `1 ≤ j ≤ K`.
pub fn moduli(seq: &FunctionSequence, family: &[Functional]) -> Result<Vec<ModulusCurve>> {
    let k = seq.len() as i32;
    let thresholds: Vec<f64> = (0..=k).map(|j| (j as f64).exp2()).collect();
    let deltas: Vec<f64> = (1..=k).map(|j| (-(j as f64)).exp2()).collect();
    Ok(vec![
        ui_modulus(seq, &thresholds),
        equi_modulus(seq, &deltas),
        pettis_ui_modulus(seq, family, &thresholds)?,
    ])
}

type CriterionFn = fn(&FunctionSequence, &SearchConfig) -> Result<CriterionVerdict>;

fn set_bocce_members(seq: &FunctionSequence, cfg: &SearchConfig) -> Result<CriterionVerdict> {
    set_bocce_check(seq.members(), cfg)
}

fn small_bocce_members(seq: &FunctionSequence, cfg: &SearchConfig) -> Result<CriterionVerdict> {
    small_bocce_set_check(seq.members(), cfg)
}

const CRITERIA: [(&str, CriterionFn); 7] = [
    ("sequential_bocce", sequential_bocce_check),
    ("sequential_pettis_bocce", sequential_pettis_bocce_check),
    ("b0", b0_check),
    ("b1", b1_check),
    ("b2", b2_check),
    ("set_bocce", set_bocce_members),
    ("small_bocce_set", small_bocce_members),
];

/// Verdict statuses as premises: satisfied, falsified or unknown.
pub fn verdict_truth(status: VerdictStatus) -> Option<bool> {
    match status {
        VerdictStatus::SatisfiedAtResolution => Some(true),
        VerdictStatus::Falsified => Some(false),
        VerdictStatus::Inconclusive => None,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeReport {
    pub label: String,
    pub kind: SpaceKind,
    pub prefix: usize,
    pub tol: f64,
    pub eta: f64,
    /// One-based index of the first member in the flag window.
    pub window_from: usize,
    pub trends: Option<Trends>,
    pub flags: Option<Flags>,
    pub criteria: Vec<CriterionVerdict>,
    pub moduli: Vec<ModulusCurve>,
    pub tightness: Vec<TightnessOutcome>,
    pub biting: Option<BitingDecomposition>,
    pub theorems: Vec<TheoremCheck>,
    /// Failed sections with their error messages.
    pub errors: BTreeMap<String, String>,
}

impl LatticeReport {
    pub fn criterion(&self, name: &str) -> Option<&CriterionVerdict> {
        self.criteria.iter().find(|c| c.criterion == name)
    }

    /// Rows `k,metric,value`; moduli rows leave `k` empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,metric,value\n");
        if let Some(t) = &self.trends {
            for (name, series) in t.named() {
                for (i, v) in series.iter().enumerate() {
                    out.push_str(&format!("{},trend.{name},{}\n", i + 1, fmt_float(*v)));
                }
            }
            for s in &t.delta_cauchy {
                for (i, v) in s.values.iter().enumerate() {
                    out.push_str(&format!("{},trend.delta_cauchy.B={},{}\n", i + 1, s.set, fmt_float(*v)));
                }
            }
        }
        for m in &self.moduli {
            let name = serde_json::to_value(m.kind)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            let param = if m.decreasing { "c" } else { "delta" };
            for (t, v) in &m.points {
                out.push_str(&format!(",modulus.{name}.{param}={},{}\n", fmt_float(*t), fmt_float(*v)));
            }
        }
        out
    }
}

/// Twelve significant digits, trailing zeros trimmed.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float");
    format!("{rounded}")
}

/// Runs every section; failures are recorded per section while the rest of
/// the report is still produced.
pub fn lattice_report(seq: &FunctionSequence, cfg: &LatticeConfig) -> Result<LatticeReport> {
    seq.require_limit()?;
    let kind = seq.kind();
    let family = cfg.family(kind);
    let mut errors = BTreeMap::new();

    let ((trends, criteria), (moduli_res, (tightness, biting))) = rayon::join(
        || {
            rayon::join(
                || compute_trends(seq, cfg),
                || {
                    if !cfg.sections.criteria {
                        return Vec::new();
                    }
                    CRITERIA
                        .par_iter()
                        .map(|(name, check)| (*name, check(seq, &cfg.search)))
                        .collect::<Vec<_>>()
                },
            )
        },
        || {
            rayon::join(
                || cfg.sections.moduli.then(|| moduli(seq, &family)),
                || {
                    rayon::join(
                        || cfg.sections.tightness.then(|| tightness_search(seq, &cfg.tightness)),
                        || cfg.sections.biting.then(|| biting_decompose(seq, &cfg.biting)),
                    )
                },
            )
        },
    );

    let (trends, flags) = match trends {
        Ok((t, f)) => (Some(t), Some(f)),
        Err(e) => {
            errors.insert("trends".to_string(), e.to_string());
            (None, None)
        }
    };
    let mut verdicts = Vec::new();
    for (name, res) in criteria {
        match res {
            Ok(v) => verdicts.push(v),
            Err(e) => {
                errors.insert(format!("criteria.{name}"), e.to_string());
            }
        }
    }
    let moduli = match moduli_res {
        Some(Ok(m)) => m,
        Some(Err(e)) => {
            errors.insert("moduli".to_string(), e.to_string());
            Vec::new()
        }
        None => Vec::new(),
    };
    let tightness = tightness.unwrap_or_default();

    let mut theorems = Vec::new();
    let bocce = verdicts
        .iter()
        .find(|v| v.criterion == "sequential_bocce")
        .map(|v| verdict_truth(v.status));
    if let (Some(f), Some(bocce)) = (flags, bocce) {
        if cfg.sections.tightness {
            let tight = is_tight(&tightness);
            theorems.push(strong_iff_from(f.strong, f.weak, bocce, tight));
            if let Some(b) = &biting {
                theorems.push(strong_biting_from(tight, bocce, b, cfg.tol));
            }
        }
    }

    Ok(LatticeReport {
        label: seq.label().to_string(),
        kind,
        prefix: seq.len(),
        tol: cfg.tol,
        eta: cfg.eta(),
        window_from: window_start(seq.len()) + 1,
        trends,
        flags,
        criteria: verdicts,
        moduli,
        tightness,
        biting,
        theorems,
        errors,
    })
}
