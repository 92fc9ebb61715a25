//! Checkers for the monogamy and polygamy inequalities on GW-class states and
//! for the scalar lemmas behind them.
//!
//! Every checker returns an [`InequalityReport`] whose `slack` is oriented so
//! that `slack ≥ 0` means the inequality holds. In every GW checker group 0
//! plays the distinguished role (`P_1`, `P`), and in the generalized monogamy
//! check group 1 is `Q`. Only the monogamy and `T_q` polygamy checkers accept
//! partitions that leave parties out (the state is then the reduced one).
//!
//! Two routes feed the checkers. The analytic route evaluates `T_q` as
//! `f_q(C²)` from the GW concurrences. The oracle route evaluates assistance
//! terms with the convex-roof optimizer; the optimizer's maximum can only
//! underestimate the true assistance, so oracle-backed right-hand sides err
//! towards reporting a violation and are marked `conservative`.

mod fuzz;
mod hamming;

pub use fuzz::{run_fuzz, Checker, FuzzConfig, FuzzOutcome};
pub use hamming::{hamming_weight, HammingOrder};

use std::fmt;

use crate::convexroof::{self, OptimizerBudget};
use crate::error::{Error, Result};
use crate::gwstates::{self, GWSpec};
use crate::measures::{self, f_q, q_window_high, q_window_low, TsallisParams};
use crate::qstate::{self, CoarseGrain, DensityMatrix, PartyPartition};
use crate::random;

pub const ANALYTIC_TOL: f64 = 1e-9;
pub const ORACLE_TOL: f64 = 1e-4;
pub const SCALAR_TOL: f64 = 1e-12;
/// Slack allowed when testing the ordering premise of the conditional bound.
pub const PREMISE_TOL: f64 = 1e-12;

pub const CSV_HEADER: &str = "name,q,alpha_or_beta,seed,lhs,rhs,slack,method,holds";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Oracle,
    JointEntropy,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Analytic => "analytic",
            Method::Oracle => "oracle",
            Method::JointEntropy => "joint-entropy",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Holds,
    Violated,
    PremiseNotMet,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "true",
            Status::Violated => "false",
            Status::PremiseNotMet => "premise-not-met",
        })
    }
}

/// How assistance terms are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AssistMethod {
    /// `f_q(C²)` of the closed-form GW concurrences.
    Analytic,
    /// `tsallis_assist` on each compressed pairwise state.
    Oracle(OptimizerBudget),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub q: Option<f64>,
    /// `α` or `β`, or the exponent of a scalar lemma.
    pub param: Option<f64>,
    pub partition: Option<String>,
    pub seed: Option<u64>,
    pub method: Method,
    pub tol: f64,
    pub status: Status,
    /// Evaluated at an endpoint of a parameter range (or `β = 0`).
    pub degenerate: bool,
    /// One side comes from the optimizer and can only err towards a violation.
    pub conservative: bool,
}

impl InequalityReport {
    pub fn new(name: &'static str, lhs: f64, rhs: f64, slack: f64, method: Method, tol: f64) -> Self {
        let status = if slack >= -tol { Status::Holds } else { Status::Violated };
        InequalityReport {
            name,
            lhs,
            rhs,
            slack,
            q: None,
            param: None,
            partition: None,
            seed: None,
            method,
            tol,
            status,
            degenerate: false,
            conservative: false,
        }
    }

    /// False only for a genuine violation; an unmet premise is not one.
    pub fn holds(&self) -> bool {
        self.status != Status::Violated
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_param(mut self, param: f64) -> Self {
        self.param = Some(param);
        self
    }

    pub fn with_partition(mut self, partition: &PartyPartition) -> Self {
        self.partition = Some(partition.to_string());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn degenerate(mut self, flag: bool) -> Self {
        self.degenerate |= flag;
        self
    }

    fn conservative(mut self, flag: bool) -> Self {
        self.conservative = flag;
        self
    }

    fn premise_not_met(mut self) -> Self {
        self.status = Status::PremiseNotMet;
        self
    }

    /// `name,q,alpha_or_beta,seed,lhs,rhs,slack,method,holds`
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.name,
            opt(self.q),
            opt(self.param),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            format_float(self.lhs),
            format_float(self.rhs),
            format_float(self.slack),
            self.method,
            self.status
        )
    }
}

/// Formats a float with 12 significant digits, trailing zeros removed
/// (like C's `%.12g`, with Rust-style exponents).
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..12).contains(&exp) {
        trim(&format!("{:.*}", (11 - exp) as usize, x))
    } else {
        format!("{}e{}", trim(mantissa), exp)
    }
}

fn at_endpoint(q: f64, ends: &[f64]) -> bool {
    ends.iter().any(|e| (q - e).abs() <= 1e-12)
}

fn check_groups(spec: &GWSpec, partition: &PartyPartition, min_groups: usize) -> Result<()> {
    partition.check_range(spec.n())?;
    if partition.len() < min_groups {
        return Err(Error::InvalidPartition(format!(
            "partition {partition} has {} groups, need at least {min_groups}",
            partition.len()
        )));
    }
    Ok(())
}

fn check_cover(spec: &GWSpec, partition: &PartyPartition, min_groups: usize) -> Result<()> {
    check_groups(spec, partition, min_groups)?;
    if !partition.covers(spec.n()) {
        return Err(Error::InvalidPartition(format!("partition {partition} must cover all {} parties", spec.n())));
    }
    Ok(())
}

/// `f_q` of a squared concurrence, clamping roundoff just above 1.
fn tq_of_c2(c2: f64, params: TsallisParams) -> Result<f64> {
    f_q(c2.min(1.0), params)
}

fn pair_c2(spec: &GWSpec, partition: &PartyPartition, s: usize, k: usize) -> Result<f64> {
    let g = partition.groups();
    Ok(gwstates::group_pair_concurrence(spec, &g[s], &g[k])?.powi(2))
}

fn rest_of(partition: &PartyPartition, groups: &[usize]) -> Vec<usize> {
    partition
        .groups()
        .iter()
        .enumerate()
        .filter(|(k, _)| !groups.contains(k))
        .flat_map(|(_, g)| g.iter().copied())
        .collect()
}

fn merged(partition: &PartyPartition, groups: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = groups.iter().flat_map(|&k| partition.groups()[k].iter().copied()).collect();
    out.sort_unstable();
    out
}

/// `T_q` across `P_s | (other groups)` as `f_q(C²)`. For a covering partition
/// the concurrence comes from the dual-route checked additivity on the pure
/// state; otherwise the other groups are merged into one and the reduced state
/// goes through the compressed Wootters route.
fn one_vs_rest_tq(spec: &GWSpec, partition: &PartyPartition, s: usize, params: TsallisParams) -> Result<f64> {
    let c = if partition.covers(spec.n()) {
        gwstates::onevsrest_concurrence_gw(spec, partition, s)?
    } else {
        let others = (0..partition.len()).filter(|&k| k != s).collect::<Vec<_>>();
        gwstates::group_pair_concurrence_numeric(spec, &partition.groups()[s], &merged(partition, &others))?
    };
    tq_of_c2(c * c, params)
}

/// `T_q` across `groups | rest` of the pure GW(V) state, from its Schmidt spectrum.
fn direct_tq(spec: &GWSpec, partition: &PartyPartition, groups: &[usize], params: TsallisParams) -> Result<f64> {
    let cut = PartyPartition::bipartition(merged(partition, groups), rest_of(partition, groups))?;
    measures::tsallis_pure(&gwstates::build_gwv(spec), &cut, params)
}

/// `(1+t)^x ≥ 1 + (2^x − 1) t^x` for `x ∈ [0,1]`, `t ≥ 1`.
pub fn scalar_lemma_lower(x: f64, t: f64) -> Result<InequalityReport> {
    if !(0.0..=1.0).contains(&x) || !(t >= 1.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("need x in [0, 1] and t >= 1, got x = {x}, t = {t}")));
    }
    let lhs = (1.0 + t).powf(x);
    let rhs = 1.0 + (2f64.powf(x) - 1.0) * t.powf(x);
    Ok(InequalityReport::new("scalar-lemma-lower", lhs, rhs, lhs - rhs, Method::Analytic, SCALAR_TOL)
        .with_param(x)
        .degenerate(x == 0.0 || x == 1.0))
}

/// `(1+x)^β ≤ 1 + (2^β − 1) x^β` for `x, β ∈ [0,1]`.
pub fn scalar_lemma_upper(x: f64, beta: f64) -> Result<InequalityReport> {
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!("need x, beta in [0, 1], got x = {x}, beta = {beta}")));
    }
    let lhs = (1.0 + x).powf(beta);
    let rhs = 1.0 + (2f64.powf(beta) - 1.0) * x.powf(beta);
    Ok(InequalityReport::new("scalar-lemma-upper", lhs, rhs, rhs - lhs, Method::Analytic, SCALAR_TOL)
        .with_param(beta)
        .degenerate(beta == 0.0))
}

/// `T_q^α(ρ_{P_1|P_2⋯P_k}) ≥ Σ_{i≥2} T_q^α(ρ_{P_1 P_i})` for `q` in the convex window and `α ≥ 2`.
pub fn check_monogamy_squared(
    spec: &GWSpec,
    partition: &PartyPartition,
    params: TsallisParams,
    alpha: f64,
) -> Result<InequalityReport> {
    if !params.in_convex_range() {
        return Err(Error::InvalidParameter(format!(
            "q = {} outside [{}, {}]",
            params.q(),
            q_window_low(),
            q_window_high()
        )));
    }
    if !(alpha >= 2.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be at least 2")));
    }
    check_groups(spec, partition, 2)?;
    let lhs = one_vs_rest_tq(spec, partition, 0, params)?.powf(alpha);
    let mut rhs = 0.0;
    for k in 1..partition.len() {
        rhs += tq_of_c2(pair_c2(spec, partition, 0, k)?, params)?.powf(alpha);
    }
    Ok(InequalityReport::new("monogamy-squared", lhs, rhs, lhs - rhs, Method::Analytic, ANALYTIC_TOL)
        .with_q(params.q())
        .with_param(alpha)
        .with_partition(partition)
        .degenerate(at_endpoint(params.q(), &[q_window_low(), q_window_high()]) || alpha == 2.0))
}

/// `T_q^β(ρ_{P_1|P_2⋯P_k}) ≤ Σ_{i≥2} T_q^β(ρ_{P_1 P_i})` for `q` in the concave window and `0 < β ≤ 1`.
pub fn check_polygamy_tq(
    spec: &GWSpec,
    partition: &PartyPartition,
    params: TsallisParams,
    beta: f64,
) -> Result<InequalityReport> {
    if !params.in_concave_range() {
        return Err(Error::InvalidParameter(format!(
            "q = {} outside [{}, 2] ∪ [3, {}]",
            params.q(),
            q_window_low(),
            q_window_high()
        )));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("beta = {beta} must lie in (0, 1]")));
    }
    check_groups(spec, partition, 2)?;
    let lhs = one_vs_rest_tq(spec, partition, 0, params)?.powf(beta);
    let mut rhs = 0.0;
    for k in 1..partition.len() {
        rhs += tq_of_c2(pair_c2(spec, partition, 0, k)?, params)?.powf(beta);
    }
    Ok(InequalityReport::new("polygamy-tq", lhs, rhs, rhs - lhs, Method::Analytic, ANALYTIC_TOL)
        .with_q(params.q())
        .with_param(beta)
        .with_partition(partition)
        .degenerate(at_endpoint(params.q(), &[q_window_low(), 2.0, 3.0, q_window_high()])))
}

/// `|T_q(ρ_A) − T_q(ρ_B)| ≤ (1 − Tr ρ_AB^q)/(q−1) ≤ T_q(ρ_A) + T_q(ρ_B)`, as
/// `[lower, upper]` reports. Parties outside the two-group `cut` are traced out.
pub fn check_subadditivity(
    rho: &DensityMatrix,
    cut: &PartyPartition,
    params: TsallisParams,
) -> Result<[InequalityReport; 2]> {
    if params.q() <= 1.0 {
        return Err(Error::InvalidParameter(format!("subadditivity needs q > 1, got {}", params.q())));
    }
    if cut.len() != 2 {
        return Err(Error::InvalidPartition(format!("cut {cut} must have two groups")));
    }
    let joint = rho.coarse_grain(cut)?;
    let marginal = |k: usize| -> Result<f64> {
        let spectrum = qstate::eigvals_hermitian(&joint.partial_trace(&[k])?)?;
        Ok(measures::tsallis_of_spectrum(&spectrum, params.q()))
    };
    let (ta, tb) = (marginal(0)?, marginal(1)?);
    let tab = measures::tsallis_entropy(&joint, params)?;
    let lower = InequalityReport::new(
        "subadditivity-lower",
        (ta - tb).abs(),
        tab,
        tab - (ta - tb).abs(),
        Method::JointEntropy,
        ANALYTIC_TOL,
    );
    let upper = InequalityReport::new("subadditivity-upper", tab, ta + tb, ta + tb - tab, Method::JointEntropy, ANALYTIC_TOL);
    Ok([lower, upper].map(|r| r.with_q(params.q()).with_partition(cut)))
}

/// Both orientations of `T_q(ψ_{PQ|R_1⋯R_{k−2}})` versus `Σ_i [T_q(ρ_{P R_i}) − T_q(ρ_{Q R_i})]`
/// for `q ∈ {2, 3}`, as `[stated (≤), derived (≥)]` reports.
///
/// The left side is the joint Tsallis entropy of the `PQ` marginal, taken from
/// the smaller of the two complementary marginals of the pure state (they share
/// their nonzero spectrum).
pub fn check_generalized_monogamy(
    spec: &GWSpec,
    partition: &PartyPartition,
    q: u32,
) -> Result<[InequalityReport; 2]> {
    if q != 2 && q != 3 {
        return Err(Error::InvalidParameter(format!("generalized monogamy needs q = 2 or 3, got {q}")));
    }
    check_cover(spec, partition, 3)?;
    let params = TsallisParams::new(f64::from(q))?;
    let pq = merged(partition, &[0, 1]);
    let rest = rest_of(partition, &[0, 1]);
    let dim = |ps: &[usize]| ps.iter().map(|_| spec.local_dim()).product::<usize>();
    let side = if dim(&pq) <= dim(&rest) { pq } else { rest };
    let marginal = gwstates::build_gwv(spec).reduced(&side)?;
    let lhs = measures::joint_tsallis_q23(&marginal, q)?;
    let mut rhs = 0.0;
    for k in 2..partition.len() {
        rhs += tq_of_c2(pair_c2(spec, partition, 0, k)?, params)? - tq_of_c2(pair_c2(spec, partition, 1, k)?, params)?;
    }
    let stated = InequalityReport::new("generalized-monogamy-stated", lhs, rhs, rhs - lhs, Method::JointEntropy, ANALYTIC_TOL);
    let derived = InequalityReport::new("generalized-monogamy-derived", lhs, rhs, lhs - rhs, Method::JointEntropy, ANALYTIC_TOL);
    Ok([stated, derived].map(|r| r.with_q(f64::from(q)).with_partition(partition)))
}

fn check_corollary_q(params: TsallisParams) -> Result<()> {
    let q = params.q();
    if (q > 1.0 && q <= 2.0) || (3.0..=q_window_high()).contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("q = {q} outside (1, 2] ∪ [3, {}]", q_window_high())))
    }
}

/// `T_q(ρ_{P_1|P_2P_3}) ≤ T_q(ρ_{P_2|P_1P_3}) + T_q(ρ_{P_3|P_1P_2})` for a three-group partition.
pub fn check_tripartite_corollary(
    spec: &GWSpec,
    partition: &PartyPartition,
    params: TsallisParams,
) -> Result<InequalityReport> {
    check_corollary_q(params)?;
    check_cover(spec, partition, 3)?;
    if partition.len() != 3 {
        return Err(Error::InvalidPartition(format!("partition {partition} must have exactly three groups")));
    }
    let t: Vec<f64> = (0..3).map(|s| one_vs_rest_tq(spec, partition, s, params)).collect::<Result<_>>()?;
    let rhs = t[1] + t[2];
    Ok(InequalityReport::new("tripartite-corollary", t[0], rhs, rhs - t[0], Method::Analytic, ANALYTIC_TOL)
        .with_q(params.q())
        .with_partition(partition)
        .degenerate(at_endpoint(params.q(), &[2.0, 3.0, q_window_high()])))
}

/// `T_q(ρ_{P_1P_2|Q_1⋯Q_k}) ≤ 2T_q(ρ_{P_2|P_1}) + Σ_i T_q(ρ_{P_1|Q_i}) + Σ_i T_q(ρ_{P_2|Q_i})`.
///
/// The left side comes from the Schmidt spectrum of the pure state; the
/// pairwise terms are `f_q(C²)`.
pub fn check_pair_vs_rest_corollary(
    spec: &GWSpec,
    partition: &PartyPartition,
    params: TsallisParams,
) -> Result<InequalityReport> {
    check_corollary_q(params)?;
    check_cover(spec, partition, 3)?;
    let lhs = direct_tq(spec, partition, &[0, 1], params)?;
    let mut rhs = 2.0 * tq_of_c2(pair_c2(spec, partition, 0, 1)?, params)?;
    for k in 2..partition.len() {
        rhs += tq_of_c2(pair_c2(spec, partition, 0, k)?, params)? + tq_of_c2(pair_c2(spec, partition, 1, k)?, params)?;
    }
    Ok(InequalityReport::new("pair-vs-rest-corollary", lhs, rhs, rhs - lhs, Method::Analytic, ANALYTIC_TOL)
        .with_q(params.q())
        .with_partition(partition)
        .degenerate(at_endpoint(params.q(), &[2.0, 3.0, q_window_high()])))
}

/// Assistance `T_q^a(ρ_{P_0 P_k})` for every group `k ≥ 1`, in group order.
pub fn pairwise_assist_values(
    spec: &GWSpec,
    partition: &PartyPartition,
    params: TsallisParams,
    method: AssistMethod,
) -> Result<Vec<f64>> {
    let g = partition.groups();
    (1..partition.len())
        .map(|k| match method {
            AssistMethod::Analytic => tq_of_c2(pair_c2(spec, partition, 0, k)?, params),
            AssistMethod::Oracle(budget) => {
                let rho = measures::project_to_effective_2x2(&gwstates::group_pair_state(spec, &g[0], &g[k])?)?;
                let cut = PartyPartition::singletons(2);
                let b = budget.with_seed(random::child_seed(budget.seed, k as u64));
                convexroof::tsallis_assist(&rho, &cut, params, &b)
            }
        })
        .collect()
}

/// `T^a` across `P_0 | rest` of the pure state. Assistance of a pure state is its
/// pure-state value, so the oracle route reads it off the Schmidt spectrum.
fn one_vs_rest_assist(
    spec: &GWSpec,
    partition: &PartyPartition,
    params: TsallisParams,
    method: AssistMethod,
) -> Result<f64> {
    match method {
        AssistMethod::Analytic => one_vs_rest_tq(spec, partition, 0, params),
        AssistMethod::Oracle(_) => direct_tq(spec, partition, &[0], params),
    }
}

fn assist_flavour(method: AssistMethod) -> (Method, f64, bool) {
    match method {
        AssistMethod::Analytic => (Method::Analytic, ANALYTIC_TOL, false),
        AssistMethod::Oracle(_) => (Method::Oracle, ORACLE_TOL, true),
    }
}

/// `T_q^a(ρ_{P_1|P_2⋯P_k}) ≤ Σ_{i≥2} T_q^a(ρ_{P_1|P_i})`.
///
/// The analytic route takes every term as `f_q(C²)` and is restricted to `q = 2`.
pub fn check_polygamy_assist(
    spec: &GWSpec,
    partition: &PartyPartition,
    params: TsallisParams,
    method: AssistMethod,
) -> Result<InequalityReport> {
    if matches!(method, AssistMethod::Analytic) && params.q() != 2.0 {
        return Err(Error::InvalidParameter(format!("analytic assistance route needs q = 2, got {}", params.q())));
    }
    check_cover(spec, partition, 2)?;
    let lhs = one_vs_rest_assist(spec, partition, params, method)?;
    let rhs: f64 = pairwise_assist_values(spec, partition, params, method)?.iter().sum();
    let (m, tol, conservative) = assist_flavour(method);
    Ok(InequalityReport::new("polygamy-assist", lhs, rhs, rhs - lhs, m, tol)
        .with_q(params.q())
        .with_partition(partition)
        .conservative(conservative))
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!("beta = {beta} outside [0, 1]")));
    }
    Ok(())
}

fn assist_order(spec: &GWSpec, partition: &PartyPartition, method: AssistMethod) -> Result<(f64, HammingOrder)> {
    check_cover(spec, partition, 3)?;
    let params = TsallisParams::new(2.0)?;
    let values = pairwise_assist_values(spec, partition, params, method)?;
    let entries: Vec<(usize, f64)> = values.into_iter().enumerate().map(|(i, v)| (i + 1, v)).collect();
    Ok((one_vs_rest_assist(spec, partition, params, method)?, HammingOrder::new(&entries)))
}

/// `[T_2^a(ρ_{P|P_{j_0}⋯P_{j_{m−1}}})]^β ≤ Σ_i (2^β−1)^{w_H(i)} [T_2^a(ρ_{P|P_{j_i}})]^β`
/// with the groups sorted by nonincreasing pairwise assistance.
pub fn check_hamming_polygamy(
    spec: &GWSpec,
    partition: &PartyPartition,
    beta: f64,
    method: AssistMethod,
) -> Result<(InequalityReport, HammingOrder)> {
    check_beta(beta)?;
    let (total, order) = assist_order(spec, partition, method)?;
    let base = 2f64.powf(beta) - 1.0;
    let lhs = total.powf(beta);
    let rhs: f64 = order.values.iter().zip(&order.weights).map(|(v, &w)| base.powi(w as i32) * v.powf(beta)).sum();
    let (m, tol, conservative) = assist_flavour(method);
    let report = InequalityReport::new("hamming-polygamy", lhs, rhs, rhs - lhs, m, tol)
        .with_q(2.0)
        .with_param(beta)
        .with_partition(partition)
        .degenerate(beta == 0.0)
        .conservative(conservative);
    Ok((report, order))
}

/// `[T_2^a(ρ_{P|P_{j_0}⋯P_{j_{m−1}}})]^β ≤ Σ_i (2^β−1)^i [T_2^a(ρ_{P|P_{j_i}})]^β`,
/// valid when each sorted term dominates the sum of the later ones. If that
/// premise fails the report is tagged [`Status::PremiseNotMet`].
pub fn check_conditional_tighter_polygamy(
    spec: &GWSpec,
    partition: &PartyPartition,
    beta: f64,
    method: AssistMethod,
) -> Result<(InequalityReport, HammingOrder)> {
    check_beta(beta)?;
    let (total, order) = assist_order(spec, partition, method)?;
    let v = &order.values;
    let premise = (0..v.len()).all(|i| v[i] >= v[i + 1..].iter().sum::<f64>() - PREMISE_TOL);
    let base = 2f64.powf(beta) - 1.0;
    let lhs = total.powf(beta);
    let rhs: f64 = v.iter().enumerate().map(|(i, t)| base.powi(i as i32) * t.powf(beta)).sum();
    let (m, tol, conservative) = assist_flavour(method);
    let mut report = InequalityReport::new("conditional-polygamy", lhs, rhs, rhs - lhs, m, tol)
        .with_q(2.0)
        .with_param(beta)
        .with_partition(partition)
        .degenerate(beta == 0.0)
        .conservative(conservative);
    if !premise {
        report = report.premise_not_met();
    }
    Ok((report, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn example() -> GWSpec {
        GWSpec::new(vec![vec![r(0.5f64.sqrt())], vec![r(0.5)], vec![r(0.4)], vec![r(0.3)]], 1.0).unwrap()
    }

    fn tq(q: f64) -> TsallisParams {
        TsallisParams::new(q).unwrap()
    }

    #[test]
    fn float_format() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(0.1875), "0.1875");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(-2.5), "-2.5");
        assert_eq!(format_float(123456.0), "123456");
        assert_eq!(format_float(1.5e-7), "1.5e-7");
        assert_eq!(format_float(2.0f64.sqrt() / 2.0), "0.707106781187");
        assert_eq!(format_float(1e15), "1e15");
        assert_eq!(format_float(0.9999999999999), "1");
    }

    #[test]
    fn scalar_lemma_reference_values() {
        assert_eq!(scalar_lemma_lower(1.0, 1.0).unwrap().slack, 0.0);
        assert_eq!(scalar_lemma_lower(0.0, 7.0).unwrap().slack, 0.0);
        let s = scalar_lemma_lower(0.5, 4.0).unwrap().slack;
        assert!((s - (5f64.sqrt() - 1.0 - (2f64.sqrt() - 1.0) * 2.0)).abs() < 1e-15);
        assert!(scalar_lemma_upper(1.0, 0.3).unwrap().slack.abs() < 1e-15);
        assert!(scalar_lemma_upper(0.4, 1.0).unwrap().slack.abs() < 1e-15);
        let u = scalar_lemma_upper(0.25, 0.5).unwrap().slack;
        assert!((u - (1.0 + (2f64.sqrt() - 1.0) * 0.5 - 1.25f64.sqrt())).abs() < 1e-15);
        assert!(scalar_lemma_lower(0.5, 0.5).is_err());
        assert!(scalar_lemma_upper(1.5, 0.5).is_err());
    }

    #[test]
    fn example_monogamy_q3() {
        let part = PartyPartition::singletons(4);
        let rep = check_monogamy_squared(&example(), &part, tq(3.0), 2.0).unwrap();
        // C²(A1|rest) = 1 over all four parties
        assert!((rep.lhs - (3.0 / 8.0f64).powi(2)).abs() < 1e-12);
        let rhs = [0.5f64, 0.32, 0.18].iter().map(|c2| (3.0 * c2 / 8.0).powi(2)).sum::<f64>();
        assert!((rep.rhs - rhs).abs() < 1e-12);
        assert!(rep.holds() && rep.slack > 0.0);
        assert!(check_monogamy_squared(&example(), &part, tq(5.0), 2.0).is_err());
        assert!(check_monogamy_squared(&example(), &part, tq(2.0), 1.5).is_err());
    }

    #[test]
    fn example_reduced_three_party_monogamy() {
        // ρ_{A1A2A3}: C²(A1|A2A3) = 0.5 + 0.32
        let part = PartyPartition::singletons(3);
        let rep = check_monogamy_squared(&example(), &part, tq(3.0), 2.0).unwrap();
        assert!((rep.lhs - (3.0 * 0.82 / 8.0f64).powi(2)).abs() < 1e-12);
        assert!((rep.rhs - (0.1875f64.powi(2) + 0.12f64.powi(2))).abs() < 1e-12);
        assert!(rep.slack > 0.0);
    }

    #[test]
    fn two_group_cases_are_equalities() {
        let spec = GWSpec::symmetric_w(3, 2).unwrap();
        let part = PartyPartition::parse("0|1,2").unwrap();
        let mono = check_monogamy_squared(&spec, &part, tq(2.0), 3.0).unwrap();
        assert!(mono.slack.abs() < 1e-12);
        let poly = check_polygamy_tq(&spec, &part, tq(2.0), 1.0).unwrap();
        assert!(poly.slack.abs() < 1e-12);
    }

    #[test]
    fn subadditivity_on_pure_and_product() {
        let bell = crate::qstate::PureState::normalized(vec![2, 2], vec![r(1.0), r(0.0), r(0.0), r(1.0)]).unwrap();
        let cut = PartyPartition::singletons(2);
        let [lo, up] = check_subadditivity(&bell.density(), &cut, tq(2.0)).unwrap();
        assert!(lo.slack.abs() < 1e-12 && lo.rhs.abs() < 1e-12);
        assert!((up.slack - 1.0).abs() < 1e-12);

        let mut rng = random::rng_from_seed(3);
        let a = random::random_density(&mut rng, vec![2], 2).unwrap();
        let b = random::random_density(&mut rng, vec![3], 2).unwrap();
        let [_, up] = check_subadditivity(&a.tensor(&b), &cut, tq(2.0)).unwrap();
        let ta = measures::tsallis_entropy(&a, tq(2.0)).unwrap();
        let tb = measures::tsallis_entropy(&b, tq(2.0)).unwrap();
        assert!((up.slack - ta * tb).abs() < 1e-12);
        assert!(check_subadditivity(&a.tensor(&b), &cut, tq(0.5)).is_err());
    }

    #[test]
    fn generalized_monogamy_symmetric_w() {
        let spec = GWSpec::symmetric_w(4, 1).unwrap();
        let [stated, derived] = check_generalized_monogamy(&spec, &PartyPartition::singletons(4), 2).unwrap();
        assert!(stated.rhs.abs() < 1e-15);
        // ρ_{A1A2} has spectrum (1/2, 1/2): T_2 = 1/2
        assert!((stated.lhs - 0.5).abs() < 1e-12);
        assert!(!stated.holds() && derived.holds());
        assert!(check_generalized_monogamy(&spec, &PartyPartition::singletons(4), 4).is_err());
        assert!(check_generalized_monogamy(&spec, &PartyPartition::parse("0|1,2,3").unwrap(), 2).is_err());
    }

    #[test]
    fn tripartite_symmetric_w() {
        let spec = GWSpec::symmetric_w(3, 1).unwrap();
        let rep = check_tripartite_corollary(&spec, &PartyPartition::singletons(3), tq(2.0)).unwrap();
        assert!((rep.rhs - 2.0 * rep.lhs).abs() < 1e-12);
        assert!((rep.slack - rep.lhs).abs() < 1e-12 && rep.slack > 0.0);
        let ex = check_tripartite_corollary(&example(), &PartyPartition::parse("0|1|2,3").unwrap(), tq(2.0)).unwrap();
        assert!(ex.holds());
        assert!(check_tripartite_corollary(&spec, &PartyPartition::singletons(3), tq(2.5)).is_err());
        assert!(check_tripartite_corollary(&spec, &PartyPartition::singletons(3), tq(0.9)).is_err());
    }

    #[test]
    fn pair_vs_rest_symmetric_w() {
        let spec = GWSpec::symmetric_w(4, 1).unwrap();
        let rep = check_pair_vs_rest_corollary(&spec, &PartyPartition::singletons(4), tq(2.0)).unwrap();
        // C² of every pair is 4/16; the A1A2|A3A4 cut has C² = 4·(1/2)(1/2) = 1
        assert!((rep.lhs - 0.5).abs() < 1e-12);
        assert!((rep.rhs - 6.0 * 0.125).abs() < 1e-12);
        let k1 = check_pair_vs_rest_corollary(&spec, &PartyPartition::parse("0|1|2,3").unwrap(), tq(3.0)).unwrap();
        assert!(k1.holds());
    }

    #[test]
    fn polygamy_assist_analytic_and_vacuum() {
        let spec = example();
        let part = PartyPartition::singletons(4);
        let rep = check_polygamy_assist(&spec, &part, tq(2.0), AssistMethod::Analytic).unwrap();
        assert!(rep.slack.abs() < 1e-12 && rep.holds());
        assert!(check_polygamy_assist(&spec, &part, tq(3.0), AssistMethod::Analytic).is_err());
        let vac = spec.with_p(0.0).unwrap();
        let rep = check_polygamy_assist(&vac, &part, tq(2.0), AssistMethod::Analytic).unwrap();
        assert_eq!((rep.lhs, rep.rhs), (0.0, 0.0));
    }

    #[test]
    fn polygamy_assist_oracle_is_conservative() {
        let part = PartyPartition::singletons(3);
        let spec = GWSpec::symmetric_w(3, 1).unwrap().with_p(0.7).unwrap();
        let budget = OptimizerBudget { restarts: 10, ..OptimizerBudget::default() };
        let rep = check_polygamy_assist(&spec, &part, tq(2.0), AssistMethod::Oracle(budget)).unwrap();
        assert!(rep.conservative && rep.method == Method::Oracle);
        assert!(rep.holds());
    }

    #[test]
    fn hamming_beta_one_two_groups_is_assist_polygamy() {
        let spec = GWSpec::symmetric_w(3, 1).unwrap();
        let part = PartyPartition::singletons(3);
        let (rep, order) = check_hamming_polygamy(&spec, &part, 1.0, AssistMethod::Analytic).unwrap();
        let poly = check_polygamy_assist(&spec, &part, tq(2.0), AssistMethod::Analytic).unwrap();
        assert!((rep.slack - poly.slack).abs() < 1e-15);
        assert_eq!(order.order, vec![1, 2]);
        assert_eq!(order.weights, vec![0, 1]);
    }

    #[test]
    fn hamming_beta_zero_is_degenerate() {
        let (rep, _) =
            check_hamming_polygamy(&example(), &PartyPartition::singletons(4), 0.0, AssistMethod::Analytic).unwrap();
        assert_eq!((rep.lhs, rep.rhs, rep.slack), (1.0, 1.0, 0.0));
        assert!(rep.degenerate);
    }

    #[test]
    fn conditional_premise_handling() {
        // pairwise values proportional to ‖v_k‖²: 1/2, 1/4, 1/8 of the rest
        let a = vec![vec![r(0.5f64.sqrt())], vec![r((0.5 * 4.0 / 7.0f64).sqrt())], vec![r((0.5 * 2.0 / 7.0f64).sqrt())], vec![r((0.5 / 7.0f64).sqrt())]];
        let spec = GWSpec::new(a, 1.0).unwrap();
        let part = PartyPartition::singletons(4);
        let (rep, order) = check_conditional_tighter_polygamy(&spec, &part, 0.5, AssistMethod::Analytic).unwrap();
        assert_eq!(rep.status, Status::Holds);
        assert_eq!(order.order, vec![1, 2, 3]);
        let (rep, _) =
            check_conditional_tighter_polygamy(&GWSpec::symmetric_w(4, 1).unwrap(), &part, 0.5, AssistMethod::Analytic)
                .unwrap();
        assert_eq!(rep.status, Status::PremiseNotMet);
        assert!(rep.holds());
        assert!(rep.csv_row().ends_with(",premise-not-met"));
    }

    #[test]
    fn csv_row_layout() {
        let rep = scalar_lemma_upper(0.25, 0.5).unwrap().with_seed(7);
        let row = rep.csv_row();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), CSV_HEADER.split(',').count());
        assert_eq!(fields[0], "scalar-lemma-upper");
        assert_eq!(fields[1], "");
        assert_eq!(fields[2], "0.5");
        assert_eq!(fields[3], "7");
        assert_eq!(fields[7], "analytic");
        assert_eq!(fields[8], "true");
    }

    #[test]
    fn partitions_must_cover_where_required() {
        let part = PartyPartition::parse("0|1|2").unwrap();
        assert!(check_tripartite_corollary(&example(), &part, tq(2.0)).is_err());
        assert!(check_polygamy_assist(&example(), &part, tq(2.0), AssistMethod::Analytic).is_err());
        assert!(check_monogamy_squared(&example(), &PartyPartition::parse("0|4").unwrap(), tq(2.0), 2.0).is_err());
    }
}
