//! Audit configuration, element/chain parsing, and the axiom report.

use std::collections::BTreeMap;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::{multiply, shift_power_defect, CornerMatrix, SurfaceElement, TruncatedOperator};
use crate::dirac::{
    build_dirac, commutator_d, fredholm_index, iterated_delta, iterated_delta_graded, spectrum, summability_scan,
    GradedElement, GrowthFit,
};
use crate::error::{Error, Result};
use crate::fourier::{DecayVerdict, NumericSeries, TrigPoly};
use crate::geometry::{
    finiteness_isometry_check, finiteness_phi, k0_battery, orientation_obstruction, pairing_index, ChainTerm,
    ElementMatrix, HochschildChain, OrientationVerdict, PairingInput,
};
use crate::matrix::Matrix;
use crate::real_structure::{
    build_j, commutant_dimension, conjugate_by_j, eigen_multiplicity_witness, first_order_defect, hat_element,
    j_anticommutes_with_d, j_is_involution, j_swaps_eigenvectors, standard_generators, GradingRelation,
    COMMUTANT_MAX_N,
};
use crate::scalar::{GaussianRational as Q, Scalar};
use crate::surfaces::{SurfaceKind, SurfacePreset};

/// Grid used for membership checks in the audit.
pub const MEMBERSHIP_GRID: usize = 2048;
/// Coefficients below this are dropped when a loop generator is made exact.
pub const LOOP_CUTOFF: f64 = 1e-13;
/// Seed of the polynomial sample used to compare the two membership tests.
pub const MEMBERSHIP_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub surface: SurfacePreset,
    #[serde(default = "default_truncations")]
    pub truncations: Vec<usize>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default = "default_battery")]
    pub battery: Vec<String>,
    #[serde(default = "default_chains")]
    pub chains: Vec<ChainSpec>,
    #[serde(default = "default_summability")]
    pub summability: Vec<f64>,
    #[serde(default = "default_summability_terms")]
    pub summability_terms: usize,
    /// Extra seeded random elements appended to the battery.
    #[serde(default)]
    pub random_elements: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_truncations() -> Vec<usize> {
    vec![16, 64]
}

fn default_battery() -> Vec<String> {
    ["one", "p_e0", "p_e2", "T_u", "T_ubar", "T_u^3", "T_ubar^2", "T_cos1", "T_cos4", "T_sin2"]
        .map(String::from)
        .to_vec()
}

/// A chain in the config: either the compact text form accepted by [`parse_chain`]
/// or a single term written as a list of element names with its degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChainSpec {
    Text(String),
    Elements { degree: usize, elements: Vec<String> },
}

impl ChainSpec {
    pub fn parse(&self, kind: SurfaceKind) -> Result<HochschildChain> {
        if let Self::Elements { degree, elements } = self {
            if elements.len() != degree + 2 {
                return Err(Error::MalformedChain(format!(
                    "degree {degree} needs {} elements, got {}",
                    degree + 2,
                    elements.len()
                )));
            }
        }
        parse_chain(&self.to_string(), kind)
    }
}

impl std::fmt::Display for ChainSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Text(t) => f.write_str(t),
            Self::Elements { elements, .. } => f.write_str(&elements.join("|")),
        }
    }
}

impl From<&str> for ChainSpec {
    fn from(s: &str) -> Self {
        Self::Text(s.into())
    }
}

fn default_chains() -> Vec<ChainSpec> {
    [
        "one|one|T_u|T_ubar",
        "one|one|T_u^2|T_ubar;one|one|T_ubar|T_u^2",
        "T_cos1|p_e0|T_u|T_ubar|T_u|T_ubar",
        "one|one|T_u",
        "T_u|T_ubar|T_cos2|T_u|T_ubar",
    ]
    .map(ChainSpec::from)
    .to_vec()
}

fn default_summability() -> Vec<f64> {
    vec![1.0, 1.5, 2.0]
}

fn default_summability_terms() -> usize {
    1_000_000
}

/// Default tolerance for every named check.
pub fn default_tolerances() -> BTreeMap<String, f64> {
    [
        ("spectrum", 1e-9),
        ("commutator_bounded", 1e-9),
        ("regularity", 0.0),
        ("summability_limit", 1e-3),
        ("summability_log_slope", 0.05),
        ("summability_tail", 4e-2),
        ("index", 0.0),
        ("j_identities", 0.0),
        ("first_order", 0.0),
        ("commutant", 0.0),
        ("multiplicity", 1e-9),
        ("finiteness", 0.0),
        ("orientation", 1e-9),
        ("pairing", 0.0),
        ("membership", 1e-8),
        ("product_defect", 0.0),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

impl AuditConfig {
    pub fn new(surface: SurfacePreset) -> Self {
        let mut c = Self {
            surface,
            truncations: default_truncations(),
            tolerances: BTreeMap::new(),
            battery: default_battery(),
            chains: default_chains(),
            summability: default_summability(),
            summability_terms: default_summability_terms(),
            random_elements: 0,
            seed: 0,
            output: OutputSpec::default(),
        };
        c.normalize().expect("defaults are valid");
        c
    }

    /// Parses a config document, applies defaults and validates it.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut c: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.normalize()?;
        Ok(c)
    }

    fn normalize(&mut self) -> Result<()> {
        self.truncations.sort_unstable();
        self.truncations.dedup();
        if self.truncations.is_empty() || self.truncations[0] < 8 {
            return Err(Error::Config("truncations must be non-empty and at least 8".into()));
        }
        for (k, v) in default_tolerances() {
            self.tolerances.entry(k).or_insert(v);
        }
        if self.summability_terms < 1000 {
            return Err(Error::Config("summability_terms must be at least 1000".into()));
        }
        if self.summability.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::Config("summability exponents must be positive".into()));
        }
        Ok(())
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(0.0)
    }
}

/// A named element; loop generators also keep their floating coefficients.
#[derive(Clone, Debug)]
pub struct ParsedElement {
    pub name: String,
    pub element: SurfaceElement,
    pub numeric: Option<NumericSeries>,
}

fn parse_usize(s: &str, whole: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::UnknownElement(whole.to_string()))
}

/// Element names: `one`, `zero`, `p_e{k}`, `S`, `S*`, `T_u`, `T_ubar`,
/// `T_u^k`, `T_ubar^k`, `T_cos{k}` (`u^k + ū^k`), `T_sin{k}` (`−i(u^k − ū^k)`),
/// and `loop(g,k,m)`: the winding-`m` generator on arc `k` of the genus-`g`
/// surface of the given kind, made exact by dropping coefficients below
/// [`LOOP_CUTOFF`].
pub fn parse_element(name: &str, kind: SurfaceKind) -> Result<ParsedElement> {
    let s = name.trim();
    let unknown = || Error::UnknownElement(name.to_string());
    let plain = |e: SurfaceElement| Ok(ParsedElement { name: s.to_string(), element: e, numeric: None });
    let toe = |f: TrigPoly| plain(SurfaceElement::toeplitz(f));
    match s {
        "one" | "1" => return plain(SurfaceElement::one()),
        "zero" | "0" => return plain(SurfaceElement::zero()),
        "T_u" | "S" => return plain(SurfaceElement::shift()),
        "T_ubar" | "S*" => return plain(SurfaceElement::shift_adjoint()),
        _ => {}
    }
    if let Some(k) = s.strip_prefix("p_e") {
        return plain(SurfaceElement::projection(parse_usize(k, name)?));
    }
    if let Some(k) = s.strip_prefix("T_ubar^") {
        return toe(TrigPoly::u_pow(-(parse_usize(k, name)? as i64)));
    }
    if let Some(k) = s.strip_prefix("T_u^") {
        return toe(TrigPoly::u_pow(parse_usize(k, name)? as i64));
    }
    if let Some(k) = s.strip_prefix("T_cos") {
        let k = parse_usize(k, name)? as i64;
        return toe(TrigPoly::u_pow(k).add(&TrigPoly::u_pow(-k)));
    }
    if let Some(k) = s.strip_prefix("T_sin") {
        let k = parse_usize(k, name)? as i64;
        let mi = -Q::i();
        return toe(TrigPoly::monomial(k, mi.clone()).sub(&TrigPoly::monomial(-k, mi)));
    }
    if let Some(args) = s.strip_prefix("loop(").and_then(|r| r.strip_suffix(')')) {
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(unknown());
        }
        let g = parse_usize(parts[0], name)? as u32;
        let arc = parse_usize(parts[1], name)?;
        let winding: i64 = parts[2].parse().map_err(|_| unknown())?;
        let preset = match (kind, g) {
            (SurfaceKind::NonOrientable, g) => SurfacePreset::nonorientable(g)?,
            (_, 0) => SurfacePreset::sphere(),
            (_, g) => SurfacePreset::orientable(g)?,
        };
        let series = preset.loop_generator(arc, winding, preset.recommended_max_mode())?;
        let exact = series.to_exact(LOOP_CUTOFF);
        let element = SurfaceElement::toeplitz(exact);
        return Ok(ParsedElement { name: s.to_string(), element, numeric: Some(series) });
    }
    Err(unknown())
}

/// `"a0|b|a1|…|an"` terms separated by `;`, each optionally prefixed by an
/// integer coefficient `c*`.
pub fn parse_chain(spec: &str, kind: SurfaceKind) -> Result<HochschildChain> {
    let mut degree = None;
    let mut terms = Vec::new();
    for raw in spec.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let (coeff, body) = match raw.split_once('*') {
            Some((c, rest)) if c.trim().parse::<i64>().is_ok() => (Q::from(c.trim().parse::<i64>().unwrap()), rest),
            _ => (Q::one(), raw),
        };
        let entries = body.split('|').map(|n| parse_element(n, kind).map(|p| p.element)).collect::<Result<Vec<_>>>()?;
        if entries.len() < 2 {
            return Err(Error::MalformedChain(format!("term {raw:?} needs at least a₀ and b")));
        }
        let d = entries.len() - 2;
        if *degree.get_or_insert(d) != d {
            return Err(Error::MalformedChain(format!("mixed degrees in {spec:?}")));
        }
        terms.push(ChainTerm::with_coeff(coeff, entries));
    }
    let degree = degree.ok_or_else(|| Error::MalformedChain("empty chain".into()))?;
    HochschildChain::new(degree, terms)
}

/// Projection names for the pairing: the battery names and `p_e{k}`.
pub fn parse_projection(name: &str) -> Result<ElementMatrix> {
    if let Some(b) = k0_battery().into_iter().find(|b| b.name == name.trim()) {
        return Ok(b.matrix);
    }
    let p = parse_element(name, SurfaceKind::Orientable)?;
    Ok(vec![vec![p.element]])
}

/// Random exact elements with small integer coefficients.
pub fn random_elements(count: usize, seed: u64) -> Vec<ParsedElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let deg = rng.random_range(0..=3i64);
            let symbol = TrigPoly::from_coeffs(
                (-deg..=deg).map(|k| (k, Q::int(rng.random_range(-3..=3), rng.random_range(-3..=3)))),
            );
            let d = rng.random_range(0..=2usize);
            let corner = Matrix::from_fn(d, d, |_, _| Q::int(rng.random_range(-2..=2), rng.random_range(-2..=2)));
            ParsedElement {
                name: format!("random#{i}"),
                element: SurfaceElement::new(CornerMatrix::from_matrix(corner), symbol),
                numeric: None,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ObstructedAsPredicted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expected {
    Holds,
    Obstructed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomRecord {
    pub name: String,
    pub paper_anchor: String,
    pub status: Status,
    pub expected: Expected,
    pub metrics: BTreeMap<String, Value>,
    pub n: usize,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub config: AuditConfig,
    pub records: Vec<AxiomRecord>,
    /// SHA-256 of the canonical JSON of `config` and `records`.
    pub canonical_hash: String,
    /// Seconds since the Unix epoch; excluded from the hash.
    pub generated_at: u64,
}

impl AxiomReport {
    pub fn has_failures(&self) -> bool {
        self.records.iter().any(|r| r.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per record: `name,status,n,tolerance,paper_anchor`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,status,n,tolerance,paper_anchor\n");
        for r in &self.records {
            let status = serde_json::to_value(r.status).expect("status serializes");
            let anchor = r.paper_anchor.replace('"', "\"\"");
            out += &format!("{},{},{},{:e},\"{}\"\n", r.name, status.as_str().unwrap_or(""), r.n, r.tolerance, anchor);
        }
        out
    }

    pub fn render(&self) -> String {
        match self.config.output.format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }
}

/// Hash of the report body without the timestamp.
pub fn canonical_hash(config: &AuditConfig, records: &[AxiomRecord]) -> String {
    let body = serde_json::to_string(&json!({ "config": config, "records": records })).expect("report serializes");
    hex::encode(Sha256::digest(body.as_bytes()))
}

/// Formula strings naming what each check establishes.
pub mod anchors {
    pub const SPECTRUM: &str = "spec(D) = ℤ";
    pub const COMMUTATOR: &str = "[S*N, T_f] = −i T_{ū f'}, [NS, T_f] = −i T_{u f'}";
    pub const REGULARITY: &str = "δ_N^m(T_f) = (−i)^m T_{f^{(m)}}";
    pub const SUMMABILITY: &str = "(1+|D|)^{−s} trace class iff s > 1";
    pub const PRODUCT_DEFECT: &str = "S^{#(m+k)} − S^{#m} S^{#k}, T_{fg} − T_f T_g";
    pub const INDEX: &str = "ind(D) = ind(S*) = 1";
    pub const REAL_STRUCTURE: &str = "J² = 1, JD = −DJ, J π(T_f) J⁻¹ = π(T_{f̂})";
    pub const FIRST_ORDER: &str = "[[D, a], J b J⁻¹] ∈ 𝒦_S";
    pub const COMMUTANT: &str = "A_{ij} = c_{ij} id";
    pub const MULTIPLICITY: &str = "J e_k = α_k e_k";
    pub const FINITENESS: &str = "ψ₀(b*a) = ⟨Φ(b), Φ(a)⟩";
    pub const ORIENTATION: &str = "γ = π_D(ω)";
    pub const PAIRING: &str = "ind((π(P)⊗Jπ(Q)J⁻¹) D₊₋ (π(P)⊗Jπ(Q)J⁻¹))";
    pub const MEMBERSHIP: &str = "σ̂(f)(a_k(t)) = σ̂(f)(a_k⁻¹(t))";
}

struct Ctx<'a> {
    config: &'a AuditConfig,
    records: Vec<AxiomRecord>,
}

type Metrics = BTreeMap<String, Value>;

fn metric(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

impl Ctx<'_> {
    fn push(
        &mut self,
        name: &str,
        anchor: &str,
        check: &str,
        n: usize,
        expected: Expected,
        f: impl FnOnce(f64) -> Result<(bool, Metrics)>,
    ) {
        let tol = self.config.tolerance(check);
        let (status, metrics, note) = match f(tol) {
            Ok((true, m)) => {
                (if expected == Expected::Obstructed { Status::ObstructedAsPredicted } else { Status::Pass }, m, None)
            }
            Ok((false, m)) => (Status::Fail, m, None),
            Err(e) => (Status::Fail, Metrics::new(), Some(e.to_string())),
        };
        self.records.push(AxiomRecord {
            name: name.to_string(),
            paper_anchor: anchor.to_string(),
            status,
            expected,
            metrics,
            n,
            tolerance: tol,
            note,
        });
    }

    /// Prepends `text` to the note of the last record.
    fn annotate(&mut self, text: &str) {
        if let Some(r) = self.records.last_mut() {
            r.note = Some(match r.note.take() {
                Some(prev) => format!("{text}; {prev}"),
                None => text.to_string(),
            });
        }
    }
}

const PAIRING_NOTE: &str = "index taken with the phase F₊₋ = S* in place of D₊₋ = S*N";

fn frobenius(c: &CornerMatrix) -> f64 {
    c.matrix().entries().map(|(_, _, x)| x.to_c64().norm_sqr()).sum::<f64>().sqrt()
}

/// `‖K‖_F + Σ|g_k|`, an upper bound for the norm of `K + T_g` and every compression of it.
pub fn element_norm_bound(a: &SurfaceElement) -> f64 {
    frobenius(a.corner()) + a.symbol().to_numeric().wiener_norm()
}

fn battery(config: &AuditConfig) -> Result<Vec<ParsedElement>> {
    let kind = config.surface.kind();
    let mut out = config.battery.iter().map(|n| parse_element(n, kind)).collect::<Result<Vec<_>>>()?;
    out.extend(random_elements(config.random_elements, config.seed));
    Ok(out)
}

/// Runs every check at every truncation. Check errors become failed records.
pub fn run_audit(config: &AuditConfig) -> AxiomReport {
    let mut ctx = Ctx { config, records: Vec::new() };
    let bat = battery(config);
    let chains: Vec<(String, Result<HochschildChain>)> =
        config.chains.iter().map(|c| (c.to_string(), c.parse(config.surface.kind()))).collect();

    for &n in &config.truncations {
        spectrum_checks(&mut ctx, n);
        match &bat {
            Ok(b) => battery_checks(&mut ctx, b, n),
            Err(e) => {
                let msg = e.to_string();
                ctx.push("battery", anchors::COMMUTATOR, "commutator_bounded", n, Expected::Holds, |_| {
                    Err(Error::Config(msg))
                });
            }
        }
        algebra_checks(&mut ctx, n);
        for (spec, chain) in &chains {
            orientation_check(&mut ctx, spec, chain, n);
        }
        pairing_checks(&mut ctx, n);
    }
    summability_checks(&mut ctx);
    membership_checks(&mut ctx);

    let records = ctx.records;
    let canonical_hash = canonical_hash(config, &records);
    let generated_at = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
    AxiomReport { config: config.clone(), records, canonical_hash, generated_at }
}

fn spectrum_checks(ctx: &mut Ctx, n: usize) {
    ctx.push("spectrum", anchors::SPECTRUM, "spectrum", n, Expected::Holds, |tol| {
        let r = spectrum(n, tol)?;
        let m = Metrics::from([
            ("max_deviation".into(), metric(r.max_deviation)),
            ("eigenvalues".into(), json!(r.eigenvalues.len())),
            ("boundary_artifacts".into(), json!(r.boundary_artifacts.len())),
        ]);
        Ok((r.matches_integer_spectrum() && r.max_deviation < tol.max(1e-9), m))
    });
    ctx.push("eigen_multiplicity", anchors::MULTIPLICITY, "multiplicity", n, Expected::Holds, |tol| {
        Ok((eigen_multiplicity_witness(n, tol)?, Metrics::new()))
    });
    ctx.push("index_shift_adjoint", anchors::INDEX, "index", n, Expected::Holds, |_| {
        let s = &build_dirac(n).shift.matrix;
        let idx = fredholm_index(&TruncatedOperator::new(s.adjoint(), "S*").with_edge_band(1), 1)?;
        Ok((idx == 1, Metrics::from([("index".into(), json!(idx))])))
    });
    ctx.push("real_structure", anchors::REAL_STRUCTURE, "j_identities", n, Expected::Holds, |_| {
        let j = build_j(n);
        let inv = j_is_involution(&j);
        let anti = j_anticommutes_with_d(&j);
        let swaps = j_swaps_eigenvectors(&j);
        let rel = j.grading_relation();
        let m = Metrics::from([
            ("j_squared_identity".into(), json!(inv)),
            ("jd_anticommutes".into(), json!(anti)),
            ("j_swaps_eigenvectors".into(), json!(swaps)),
            ("grading".into(), serde_json::to_value(rel).expect("relation serializes")),
        ]);
        Ok((inv && anti && swaps && rel == GradingRelation::Commutes, m))
    });
}

fn battery_checks(ctx: &mut Ctx, bat: &[ParsedElement], n: usize) {
    for p in bat {
        let a = &p.element;
        let fits = n > a.degree() + 2;
        let name = |s: &str| format!("{s}[{}]", p.name);
        if !fits {
            ctx.push(
                &name("commutator_bounded"),
                anchors::COMMUTATOR,
                "commutator_bounded",
                n,
                Expected::Holds,
                |_| Err(Error::TruncationTooSmall { n, corner: a.degree() + 3 }),
            );
            continue;
        }
        ctx.push(&name("commutator_bounded"), anchors::COMMUTATOR, "commutator_bounded", n, Expected::Holds, |tol| {
            let c = commutator_d(a);
            let w = c.degree() + 1;
            let norm = c.truncate(n)?.interior_norm(w);
            let bound = element_norm_bound(c.block(0, 1)).max(element_norm_bound(c.block(1, 0)));
            let m = Metrics::from([("interior_norm".into(), metric(norm)), ("bound".into(), metric(bound))]);
            Ok((norm <= bound + tol, m))
        });
        ctx.push(&name("regularity"), anchors::REGULARITY, "regularity", n, Expected::Holds, |_| {
            let mut ok = true;
            let mut f_m = a.symbol().clone();
            let mut sign = Q::one();
            let deltas = iterated_delta(a, 5, n)?;
            for x in &deltas.iterates {
                f_m = f_m.differentiate(1);
                sign = &sign * &(-Q::i());
                ok &= x.symbol() == &f_m.scale(&sign);
            }
            let g = iterated_delta_graded(&GradedElement::pi(a), 5, n)?;
            let h = iterated_delta_graded(&commutator_d(a), 5, n)?;
            let m = Metrics::from([
                ("delta_n_norms".into(), json!(deltas.norms.iter().map(|v| metric(*v)).collect::<Vec<_>>())),
                ("delta_abs_d_pi_norms".into(), json!(g.norms.iter().map(|v| metric(*v)).collect::<Vec<_>>())),
                ("delta_abs_d_commutator_norms".into(), json!(h.norms.iter().map(|v| metric(*v)).collect::<Vec<_>>())),
            ]);
            let finite = g.norms.iter().chain(&h.norms).chain(&deltas.norms).all(|v| v.is_finite());
            Ok((ok && finite, m))
        });
        ctx.push(&name("j_conjugation"), anchors::REAL_STRUCTURE, "j_identities", n, Expected::Holds, |_| {
            let (sym, t) = conjugate_by_j(a, n)?;
            let j = build_j(n);
            let dense = j.conjugate(&GradedElement::pi(a).truncate(n)?);
            let want = GradedElement::pi(&hat_element(a));
            Ok((sym == want && dense.to_matrix() == t.to_matrix(), Metrics::new()))
        });
        ctx.push(&name("finiteness"), anchors::FINITENESS, "finiteness", n, Expected::Holds, |_| {
            let c = finiteness_isometry_check(a, n)?;
            let phi = finiteness_phi(a, n)?;
            // column 0 of a(1 − SS*): corner column plus the nonnegative modes
            let want: Vec<Q> = (0..n).map(|k| a.entry(k, 0)).collect();
            let m = Metrics::from([("lhs".into(), metric(c.lhs)), ("rhs".into(), metric(c.rhs))]);
            Ok((c.equal && phi == want, m))
        });
    }
    let pairs: Vec<(&ParsedElement, &ParsedElement)> =
        bat.iter().flat_map(|a| bat.iter().map(move |b| (a, b))).collect();
    ctx.push("first_order_up_to_compacts", anchors::FIRST_ORDER, "first_order", n, Expected::Holds, |_| {
        let mut worst = 0i64;
        let mut ok = true;
        for (a, b) in &pairs {
            let (a, b) = (&a.element, &b.element);
            if n <= a.degree() + b.degree() + 2 {
                continue;
            }
            let d = first_order_defect(a, b, n)?;
            let bound = a.degree() + b.degree() + 1;
            ok &= d.report.verdict == DecayVerdict::FiniteSupport && d.support_radius <= bound;
            worst = worst.max(d.support_radius as i64 - bound as i64);
        }
        Ok((ok, Metrics::from([("pairs".into(), json!(pairs.len())), ("max_radius_minus_bound".into(), json!(worst))])))
    });
    ctx.push("first_order_exact", anchors::FIRST_ORDER, "first_order", n, Expected::Obstructed, |_| {
        let d = first_order_defect(&SurfaceElement::shift(), &SurfaceElement::shift_adjoint(), n)?;
        let want = GradedElement::pi(&SurfaceElement::projection(0).scale(&Q::from(-1)));
        Ok((d.defect0 == want, Metrics::from([("defect0_is_minus_p_e0".into(), json!(d.defect0 == want))])))
    });
}

fn algebra_checks(ctx: &mut Ctx, n: usize) {
    let cn = n.min(COMMUTANT_MAX_N);
    ctx.push("commutant_dimension", anchors::COMMUTANT, "commutant", cn, Expected::Holds, |_| {
        let dim = commutant_dimension(&standard_generators(), cn)?;
        Ok((dim == 4, Metrics::from([("dimension".into(), json!(dim))])))
    });
    ctx.push("product_defects", anchors::PRODUCT_DEFECT, "product_defect", n, Expected::Holds, |_| {
        let mut ok = true;
        let mut checked = 0;
        for m in -6i64..=6 {
            for k in -6i64..=6 {
                let size = (2 * (m.unsigned_abs() + k.unsigned_abs()) + 4) as usize;
                if size > n {
                    continue;
                }
                let su = |p: i64| SurfaceElement::toeplitz(TrigPoly::u_pow(p));
                let prod = multiply(&su(m), &su(k));
                let want = su(m + k).sub(&prod);
                let got = SurfaceElement::compact(shift_power_defect(m, k));
                ok &= got == want;
                checked += 1;
            }
        }
        Ok((ok, Metrics::from([("pairs".into(), json!(checked))])))
    });
}

fn orientation_check(ctx: &mut Ctx, spec: &str, chain: &Result<HochschildChain>, n: usize) {
    let name = format!("orientation[{spec}]");
    ctx.push(&name, anchors::ORIENTATION, "orientation", n, Expected::Obstructed, |tol| {
        let chain = match chain {
            Ok(c) => c,
            Err(e) => return Err(Error::MalformedChain(e.to_string())),
        };
        let r = orientation_obstruction(chain, &build_j(n), n, tol)?;
        let m = Metrics::from([
            ("degree".into(), json!(chain.degree)),
            ("residual".into(), metric(r.residual)),
            ("diag_equal".into(), json!(r.diag_top == r.diag_bottom)),
            ("symbolic_agrees".into(), json!(r.symbolic_agrees)),
            ("verdict".into(), serde_json::to_value(r.verdict).expect("verdict serializes")),
        ]);
        let ok = match r.verdict {
            OrientationVerdict::Obstructed => r.symbolic_agrees && r.residual >= 1.0 - tol,
            OrientationVerdict::ParityObstruction => true,
            OrientationVerdict::NotObstructed => false,
        };
        Ok((ok, m))
    });
}

fn pairing_checks(ctx: &mut Ctx, n: usize) {
    let j = build_j(n);
    let one = vec![vec![SurfaceElement::one()]];
    ctx.push("pairing[one,one]", anchors::PAIRING, "pairing", n, Expected::Holds, |_| {
        let r = pairing_index(&PairingInput::new(one.clone(), one.clone())?, &j, n)?;
        Ok((r.index == 1, Metrics::from([("index".into(), json!(r.index)), ("index_2n".into(), json!(r.index_2n))])))
    });
    ctx.annotate(PAIRING_NOTE);
    for q in k0_battery() {
        let name = format!("pairing[p_e0,{}]", q.name);
        ctx.push(&name, anchors::PAIRING, "pairing", n, Expected::Obstructed, |_| {
            let input = PairingInput::new(vec![vec![SurfaceElement::projection(0)]], q.matrix.clone())?;
            let r = pairing_index(&input, &j, n)?;
            let m = Metrics::from([
                ("index".into(), json!(r.index)),
                ("index_2n".into(), json!(r.index_2n)),
                ("finite_rank".into(), json!(r.finite_rank)),
            ]);
            Ok((r.index == 0, m))
        });
        ctx.annotate(PAIRING_NOTE);
    }
}

fn summability_checks(ctx: &mut Ctx) {
    let terms = ctx.config.summability_terms;
    let limit_tol = ctx.config.tolerance("summability_limit");
    for s in ctx.config.summability.clone() {
        let name = format!("summability[s={s}]");
        let check = if s <= 1.0 { "summability_log_slope" } else { "summability_tail" };
        ctx.push(&name, anchors::SUMMABILITY, check, terms, Expected::Holds, |tol| {
            let scan = summability_scan(s, terms);
            let mut m = Metrics::from([("last_partial_sum".into(), metric(scan.last()))]);
            let ok = match &scan.growth_fit {
                GrowthFit::Logarithmic { slope, residual, .. } => {
                    m.insert("slope".into(), metric(*slope));
                    m.insert("fit_residual".into(), metric(*residual));
                    // Σ_{|k|≤K} (1+|k|)^{−1} ~ 2 ln K diverges; for s < 1 the growth is a power.
                    if s == 1.0 {
                        (slope - 2.0).abs() <= tol
                    } else {
                        *slope > 2.0
                    }
                }
                GrowthFit::Convergent { decade_tails, decreasing, limit_estimate, .. } => {
                    let last_tail = decade_tails.last().map_or(f64::INFINITY, |t| t.1);
                    m.insert("limit_estimate".into(), metric(*limit_estimate));
                    m.insert("last_decade_tail".into(), metric(last_tail));
                    let mut ok = *decreasing && last_tail < tol;
                    if s == 2.0 {
                        let want = std::f64::consts::PI.powi(2) / 3.0 - 1.0;
                        let dev = (scan.last() - want).abs();
                        m.insert("deviation_from_closed_form".into(), metric(dev));
                        ok &= dev < limit_tol;
                    }
                    ok
                }
            };
            Ok((ok, m))
        });
    }
}

fn membership_checks(ctx: &mut Ctx) {
    let preset = ctx.config.surface;
    let k = preset.recommended_max_mode();
    for arc in 1..=preset.arc_count() {
        let name = format!("loop_generator[arc={arc}]");
        ctx.push(&name, anchors::MEMBERSHIP, "membership", k, Expected::Holds, |tol| {
            let f = preset.loop_generator(arc, 1, k)?;
            let mem = preset.is_member(&f, MEMBERSHIP_GRID, tol);
            let rep = f.decay_report();
            let m = Metrics::from([
                ("max_deviation".into(), metric(mem.max_deviation)),
                ("verdict".into(), json!(rep.verdict.to_string())),
            ]);
            Ok((mem.member && rep.verdict == DecayVerdict::Rapid, m))
        });
    }
    ctx.push("fourier_constraints", anchors::MEMBERSHIP, "membership", MEMBERSHIP_GRID, Expected::Holds, |tol| {
        let mut rng = ChaCha8Rng::seed_from_u64(MEMBERSHIP_SEED);
        let mut agree = 0usize;
        let mut total = 0usize;
        for _ in 0..40 {
            let deg = rng.random_range(0..=10i64);
            let f = TrigPoly::from_coeffs((-deg..=deg).map(|k| (k, Q::from(rng.random_range(-2..=2)))));
            let mirrored = f.add(&f.hat().bar());
            let even = TrigPoly::from_coeffs(f.iter().filter(|(k, _)| k % 2 == 0).map(|(k, c)| (k, c.clone())));
            let candidates = [f, mirrored, even];
            for g in candidates {
                if let Some(sym) = preset.fourier_constraints().holds(&g) {
                    total += 1;
                    agree += usize::from(sym == preset.is_member(&g, MEMBERSHIP_GRID, tol).member);
                }
            }
        }
        Ok((agree == total, Metrics::from([("agreements".into(), json!(agree)), ("checked".into(), json!(total))])))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names() {
        let k = SurfaceKind::Orientable;
        assert_eq!(parse_element("T_u^3", k).unwrap().element.symbol(), &TrigPoly::u_pow(3));
        assert_eq!(parse_element("p_e2", k).unwrap().element, SurfaceElement::projection(2));
        assert_eq!(
            parse_element("T_cos1", k).unwrap().element.symbol(),
            &TrigPoly::from_int_coeffs(&[(1, 1), (-1, 1)])
        );
        assert!(parse_element("T_x", k).is_err());
        let l = parse_element("loop(1,1,1)", k).unwrap();
        assert!(l.numeric.is_some());
        assert!(l.element.degree() > 10);
    }

    #[test]
    fn parses_chains() {
        let c = parse_chain("one|one|T_u|T_ubar; 2*T_u|one|one|one", SurfaceKind::Sphere).unwrap();
        assert_eq!(c.degree, 2);
        assert_eq!(c.terms.len(), 2);
        assert!(matches!(parse_chain("one|one|T_u;one|one", SurfaceKind::Sphere), Err(Error::MalformedChain(_))));
        assert!(matches!(parse_chain("one", SurfaceKind::Sphere), Err(Error::MalformedChain(_))));
        assert!(matches!(parse_chain("one|bogus", SurfaceKind::Sphere), Err(Error::UnknownElement(_))));

        let cfg = AuditConfig::from_json(
            r#"{"surface":{"kind":"sphere"},"chains":[{"degree":2,"elements":["one","one","T_u","T_ubar"]},"one|one|T_u"]}"#,
        )
        .unwrap();
        assert_eq!(
            cfg.chains[0].parse(SurfaceKind::Sphere).unwrap(),
            parse_chain("one|one|T_u|T_ubar", SurfaceKind::Sphere).unwrap()
        );
        let bad = ChainSpec::Elements { degree: 1, elements: vec!["one".into(), "one".into()] };
        assert!(matches!(bad.parse(SurfaceKind::Sphere), Err(Error::MalformedChain(_))));
    }

    #[test]
    fn config_schema() {
        assert!(AuditConfig::from_json(r#"{"truncations":[16]}"#).is_err());
        let c = AuditConfig::from_json(r#"{"surface":{"kind":"sphere"},"truncations":[64,16]}"#).unwrap();
        assert_eq!(c.truncations, vec![16, 64]);
        assert_eq!(c.tolerance("spectrum"), 1e-9);
        assert!(AuditConfig::from_json(r#"{"surface":{"kind":"sphere"},"bogus":1}"#).is_err());
    }

    #[test]
    fn random_battery_is_seeded() {
        let a = random_elements(3, 7);
        let b = random_elements(3, 7);
        assert!(a.iter().zip(&b).all(|(x, y)| x.element == y.element));
    }
}
