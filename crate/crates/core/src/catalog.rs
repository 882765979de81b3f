//! Instance catalogs, batch certification and certificate files.

use std::fmt::Write as _;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::{
    ce_closedness, coupling_form, nondegenerate_and_top_power, verify_block_structure, BlockReport,
    HomogeneousBundleInstance, TopPowerReport,
};
use crate::curvature::{random_pinched, twistor_fatness, PinchedTensor, Sign, TwistorReport};
use crate::duality::{compare_fat_sets, compare_fat_sets_at, dualize, CartanInvolution, SampleComparison};
use crate::error::{Error, Result};
use crate::fatness::{certify, fat_by_oracle, sample_torus, FatnessCertificate, Verdict, Verdicts, Witnesses, DEFAULT_TOL};
use crate::liealg::{build_algebra, so_block, u_block, Family, LieAlgebra, SubalgebraEmbedding};
use crate::rootdata::{
    build_root_system, detect_subsystem, evaluate, find_fat_shift, find_fat_shift_in, verify_shift, Root,
    RootSystem, RootType, SubSystem, TorusVector,
};
use crate::scalar::{format_rational, format_vec, parse_vec, scalar_strings, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Roots,
    Oracle,
    Centralizer,
    Coupling,
    Pinch,
    Dual,
    Shift,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    /// `so`, `so_pq`, `su` or `u_in_so`.
    pub family: String,
    pub params: Vec<usize>,
}

impl AlgebraSpec {
    pub fn family(&self) -> Result<Family> {
        let bad = || Error::Parse(format!("bad parameters {:?} for family {}", self.params, self.family));
        match (self.family.as_str(), self.params.as_slice()) {
            ("so", [n]) => Ok(Family::So(*n)),
            ("so_pq", [p, q]) => Ok(Family::SoPq(*p, *q)),
            ("su", [n]) => Ok(Family::Su(*n)),
            ("u_in_so", [n]) => Ok(Family::UInSo(*n)),
            ("so" | "so_pq" | "su" | "u_in_so", _) => Err(bad()),
            (other, _) => Err(Error::UnsupportedFamily(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SubalgebraSpec {
    /// `so(k)` in the top-left block.
    SoBlock { k: usize },
    /// `u(m)` inside the top-left `so(2m)`.
    UBlock { m: usize },
    /// Explicit basis in ambient coordinates (`"p/q"` strings).
    Coords { basis: Vec<Vec<String>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootSystemSpec {
    #[serde(rename = "type")]
    pub root_type: RootType,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftSpec {
    /// Root data; defaults to the sub-system detected from `g` and `h`.
    #[serde(default)]
    pub root_system: Option<RootSystemSpec>,
    /// Roots of `h` when `root_system` is given (forbidden = the rest).
    #[serde(default)]
    pub members: Vec<Root>,
    pub vertices: Vec<Vec<String>>,
    /// Restrict shifts to the span of these vectors.
    #[serde(default)]
    pub directions: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub expect_feasible: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PinchSpec {
    pub n: usize,
    pub epsilon: f64,
    pub sign: Sign,
    #[serde(default = "default_frames")]
    pub frames: usize,
}

fn default_frames() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub id: String,
    #[serde(default)]
    pub g: Option<AlgebraSpec>,
    #[serde(default)]
    pub h: Option<SubalgebraSpec>,
    /// `X_u` in torus coordinates.
    #[serde(default)]
    pub xu: Option<Vec<String>>,
    pub run: Vec<Check>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub expect: Option<Verdict>,
    #[serde(default)]
    pub shift: Option<ShiftSpec>,
    #[serde(default)]
    pub pinch: Option<PinchSpec>,
}

/// Parse a JSON array of instances; ids must be unique and tolerances positive.
pub fn parse_catalog(text: &str) -> Result<Vec<InstanceSpec>> {
    let specs: Vec<InstanceSpec> = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let mut seen = std::collections::HashSet::new();
    for s in &specs {
        if !seen.insert(s.id.as_str()) {
            return Err(Error::Parse(format!("duplicate instance id {:?}", s.id)));
        }
        if let Some(t) = s.tol {
            if !(t > 0.0) {
                return Err(Error::Parse(format!("instance {:?}: tolerance must be positive", s.id)));
            }
        }
    }
    Ok(specs)
}

pub fn load_catalog(path: &Path) -> Result<Vec<InstanceSpec>> {
    parse_catalog(&fs::read_to_string(path)?)
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn algebra(family: &str, params: &[usize]) -> Option<AlgebraSpec> {
    Some(AlgebraSpec {
        family: family.into(),
        params: params.to_vec(),
    })
}

fn base(id: &str, run: &[Check]) -> InstanceSpec {
    InstanceSpec {
        id: id.into(),
        g: None,
        h: None,
        xu: None,
        run: run.to_vec(),
        samples: None,
        seed: None,
        tol: None,
        expect: None,
        shift: None,
        pinch: None,
    }
}

pub const BUILTINS: &[(&str, &str)] = &[(
    "paper_examples",
    "twistor pairs so(2n)<so(2n+1) and so(2n)<so(2n,1), so(5)/u(2), so(4)/so(3), B2 shift searches, pinched twistor runs",
)];

pub fn builtin_catalog(name: &str) -> Option<Vec<InstanceSpec>> {
    use Check::*;
    if name != "paper_examples" {
        return None;
    }
    let triple = [Roots, Oracle, Centralizer];
    let with = |extra: &[Check]| -> Vec<Check> { triple.iter().chain(extra).copied().collect() };
    let pair = |id: &str, g: Option<AlgebraSpec>, h: SubalgebraSpec, xu: &[&str], run: Vec<Check>, expect: Verdict| {
        let mut s = base(id, &run);
        s.g = g;
        s.h = Some(h);
        s.xu = Some(strs(xu));
        s.samples = Some(200);
        s.expect = Some(expect);
        s
    };
    let mut out = vec![
        pair("so5_so4_J", algebra("so", &[5]), SubalgebraSpec::SoBlock { k: 4 }, &["1", "1"], with(&[Coupling]), Verdict::Fat),
        pair("so5_so4_t1", algebra("so", &[5]), SubalgebraSpec::SoBlock { k: 4 }, &["1", "0"], with(&[Coupling]), Verdict::NotFat),
        pair("so7_so6_J", algebra("so", &[7]), SubalgebraSpec::SoBlock { k: 6 }, &["1", "1", "1"], with(&[Coupling]), Verdict::Fat),
        pair("so5_u2_J", algebra("so", &[5]), SubalgebraSpec::UBlock { m: 2 }, &["1", "1"], with(&[Coupling]), Verdict::Fat),
        pair("so4_1_so4_J", algebra("so_pq", &[4, 1]), SubalgebraSpec::SoBlock { k: 4 }, &["1", "1"], with(&[Coupling, Dual]), Verdict::Fat),
        pair("so6_1_so6_J", algebra("so_pq", &[6, 1]), SubalgebraSpec::SoBlock { k: 6 }, &["1", "1", "1"], with(&[Dual]), Verdict::Fat),
        pair("so4_so3", algebra("so", &[4]), SubalgebraSpec::SoBlock { k: 3 }, &["1"], with(&[Coupling]), Verdict::NotFat),
    ];
    out[6].samples = Some(100);

    let mut sq = base("b2_unit_square_shift", &[Shift]);
    sq.shift = Some(ShiftSpec {
        root_system: Some(RootSystemSpec { root_type: RootType::B, rank: 2 }),
        members: vec![],
        vertices: vec![strs(&["0", "0"]), strs(&["1", "0"]), strs(&["0", "1"]), strs(&["1", "1"])],
        directions: None,
        expect_feasible: Some(true),
    });
    out.push(sq);

    let mut central = base("b2_central_shift_infeasible", &[Shift]);
    central.shift = Some(ShiftSpec {
        root_system: Some(RootSystemSpec { root_type: RootType::B, rank: 2 }),
        members: vec![],
        vertices: vec![strs(&["0", "0"])],
        directions: Some(vec![strs(&["1", "1"])]),
        expect_feasible: Some(false),
    });
    out.push(central);

    let mut moved = base("so5_so4_shift", &[Shift]);
    moved.g = algebra("so", &[5]);
    moved.h = Some(SubalgebraSpec::SoBlock { k: 4 });
    moved.shift = Some(ShiftSpec {
        root_system: None,
        members: vec![],
        vertices: vec![strs(&["1", "0"]), strs(&["2", "0"])],
        directions: None,
        expect_feasible: Some(true),
    });
    out.push(moved);

    for (id, n, epsilon, sign, seed) in [
        ("pinch_n2_pos", 2, 0.54, Sign::Positive, 1),
        ("pinch_n3_neg", 3, 0.42, Sign::Negative, 2),
    ] {
        let mut p = base(id, &[Pinch]);
        p.seed = Some(seed);
        p.pinch = Some(PinchSpec { n, epsilon, sign, frames: 100 });
        out.push(p);
    }
    Some(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WallValue {
    pub root: Root,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgebraSection {
    pub g: String,
    pub dim: usize,
    pub h_dim: usize,
    pub m_dim: usize,
    pub rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_system: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<Root>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forbidden: Option<Vec<Root>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_note: Option<String>,
}

/// The principal fatness certificate, flattened into the instance file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FatnessSection {
    #[serde(rename = "Xu")]
    pub xu: Vec<String>,
    #[serde(rename = "Xu_torus", skip_serializing_if = "Option::is_none")]
    pub xu_torus: Option<Vec<String>>,
    pub verdicts: Verdicts,
    pub min_sv: Option<f64>,
    pub max_sv: Option<f64>,
    pub singular_values: Vec<f64>,
    pub centralizer_dim: usize,
    pub witnesses: Witnesses,
    pub agreed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walls: Option<Vec<WallValue>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleSection {
    pub count: usize,
    pub fat: usize,
    pub not_fat: usize,
    pub agreed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling_mismatches: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_disagreement: Option<Box<FatnessCertificate>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingSection {
    pub n_dim: usize,
    pub v_dim: usize,
    pub gram: Vec<Vec<String>>,
    pub blocks: BlockReport,
    pub closedness_residual: String,
    pub top_power: Option<TopPowerReport>,
    pub nondegenerate: bool,
    pub matches_fatness: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualSection {
    pub dual: String,
    pub samples: usize,
    pub agreed: usize,
    pub fraction: f64,
    pub fat_count: usize,
    pub same_subsystem: bool,
    pub counterexample: Option<SampleComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at_xu: Option<SampleComparison>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftSection {
    pub root_system: String,
    pub forbidden: Vec<Root>,
    pub vertices: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<String>>>,
    pub shift: Option<Vec<String>>,
    pub verified: bool,
    /// Certified fatness of every shifted vertex, when an algebra is given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shifted_vertices: Option<Vec<Verdict>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PinchSection {
    pub n: usize,
    pub bound: f64,
    pub generator: PinchedTensor,
    pub twistor: TwistorReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceCertificate {
    pub instance: String,
    pub seed: u64,
    pub tol: f64,
    pub passed: bool,
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraSection>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub fatness: Option<FatnessSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<SampleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duality: Option<DualSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<ShiftSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pinch: Option<PinchSection>,
}

impl InstanceCertificate {
    fn new(id: &str, seed: u64, tol: f64) -> Self {
        Self {
            instance: id.to_string(),
            seed,
            tol,
            passed: false,
            failures: Vec::new(),
            expect: None,
            algebra: None,
            fatness: None,
            samples: None,
            coupling: None,
            duality: None,
            shift: None,
            pinch: None,
        }
    }

    fn fail(&mut self, msg: impl Into<String>) {
        self.failures.push(msg.into());
    }

    /// One-line summary for tables.
    pub fn headline(&self) -> String {
        let mut parts = Vec::new();
        if let Some(f) = &self.fatness {
            parts.push(format!("oracle={} roots={}", f.verdicts.oracle, f.verdicts.roots));
        }
        if let Some(s) = &self.samples {
            parts.push(format!("samples {}/{} agreed", s.agreed, s.count));
        }
        if let Some(d) = &self.duality {
            parts.push(format!("dual {}/{}", d.agreed, d.samples));
        }
        if let Some(s) = &self.shift {
            parts.push(match &s.shift {
                Some(a) => format!("shift ({})", a.join(", ")),
                None => "no shift".into(),
            });
        }
        if let Some(p) = &self.pinch {
            parts.push(format!("twistor fat={} min|diag|={:.4}", p.twistor.fat, p.twistor.min_abs_diagonal));
        }
        if let Some(f) = self.failures.first() {
            parts.push(format!("FAIL: {f}"));
        }
        parts.join("; ")
    }
}

struct Context {
    emb: SubalgebraEmbedding,
    sub: Option<SubSystem>,
    family: Family,
}

fn build_context(spec: &InstanceSpec, cert: &mut InstanceCertificate) -> Result<Option<Context>> {
    let (Some(gs), Some(hs)) = (&spec.g, &spec.h) else {
        if spec.g.is_some() || spec.h.is_some() {
            return Err(Error::Parse("g and h must be given together".into()));
        }
        return Ok(None);
    };
    let family = gs.family()?;
    let g = Arc::new(build_algebra(family)?);
    let h = match hs {
        SubalgebraSpec::SoBlock { k } => so_block(&g, *k)?,
        SubalgebraSpec::UBlock { m } => u_block(&g, *m)?,
        SubalgebraSpec::Coords { basis } => basis.iter().map(|v| parse_vec(v)).collect::<Result<_>>()?,
    };
    let emb = SubalgebraEmbedding::new(g.clone(), h)?;
    let (sub, note) = match RootSystem::for_family(family) {
        Err(e) => (None, Some(e.to_string())),
        Ok(rs) => match detect_subsystem(&emb, &rs) {
            Ok(s) => (Some(s), None),
            Err(e) => (None, Some(e.to_string())),
        },
    };
    cert.algebra = Some(AlgebraSection {
        g: g.name().to_string(),
        dim: g.dim(),
        h_dim: emb.dim_h(),
        m_dim: emb.dim_m(),
        rank: emb.rank(),
        root_system: sub.as_ref().map(|s| s.parent().label()),
        members: sub.as_ref().map(|s| s.members().to_vec()),
        forbidden: sub.as_ref().map(|s| s.forbidden().to_vec()),
        root_note: note,
    });
    Ok(Some(Context { emb, sub, family }))
}

fn principal_point(spec: &InstanceSpec, ctx: &Context) -> Result<Option<(TorusVector, Vec<Rational>)>> {
    match &spec.xu {
        None => Ok(None),
        Some(xu) => {
            let t = TorusVector(parse_vec(xu)?);
            let x = ctx.emb.torus_element(t.coords())?;
            Ok(Some((t, x)))
        }
    }
}

fn fatness_section(ctx: &Context, t: &TorusVector, x: &[Rational], cert: &FatnessCertificate, tol: f64) -> Result<FatnessSection> {
    let oracle = fat_by_oracle(&ctx.emb, x, tol)?;
    let walls = ctx.sub.as_ref().map(|s| {
        s.forbidden_positive()
            .into_iter()
            .map(|r| WallValue {
                value: format_rational(&evaluate(&r, t.coords())),
                root: r,
            })
            .collect()
    });
    Ok(FatnessSection {
        xu: cert.xu.clone(),
        xu_torus: cert.xu_torus.clone(),
        verdicts: cert.verdicts.clone(),
        min_sv: cert.min_sv,
        max_sv: cert.max_sv,
        singular_values: oracle.singular_values,
        centralizer_dim: cert.centralizer_dim,
        witnesses: cert.witnesses.clone(),
        agreed: cert.agreed,
        walls,
    })
}

fn coupling_nondegenerate(emb: &SubalgebraEmbedding, x: &[Rational]) -> Result<bool> {
    let inst = HomogeneousBundleInstance::new(emb.clone(), x.to_vec())?;
    let form = coupling_form(&inst);
    Ok(form.dim() % 2 == 0 && !form.gram.determinant().is_zero())
}


fn run_fatness(spec: &InstanceSpec, ctx: &Context, seed: u64, tol: f64, cert: &mut InstanceCertificate) -> Result<()> {
    let wants_coupling = spec.run.contains(&Check::Coupling);
    if let Some((t, x)) = principal_point(spec, ctx)? {
        match certify(&spec.id, &ctx.emb, ctx.sub.as_ref(), &x, tol) {
            Ok(fc) => {
                cert.fatness = Some(fatness_section(ctx, &t, &x, &fc, tol)?);
                if let Some(e) = spec.expect {
                    if fc.verdict() != e {
                        cert.fail(format!("expected {e}, certified {}", fc.verdict()));
                    }
                }
                if wants_coupling {
                    cert.coupling = Some(coupling_section(ctx, &x, fc.is_fat(), cert)?);
                }
            }
            Err(Error::CriteriaDisagree(fc)) => {
                cert.fatness = Some(fatness_section(ctx, &t, &x, &fc, tol)?);
                cert.fail("criteria disagree at X_u");
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(n) = spec.samples {
        let mut sec = SampleSection {
            count: n,
            fat: 0,
            not_fat: 0,
            agreed: 0,
            coupling_mismatches: wants_coupling.then_some(0),
            first_disagreement: None,
        };
        for (_, x) in sample_torus(&ctx.emb, n, seed)? {
            match certify(&spec.id, &ctx.emb, ctx.sub.as_ref(), &x, tol) {
                Ok(fc) => {
                    sec.agreed += 1;
                    if fc.is_fat() {
                        sec.fat += 1;
                    } else {
                        sec.not_fat += 1;
                    }
                    if wants_coupling && coupling_nondegenerate(&ctx.emb, &x)? != fc.is_fat() {
                        *sec.coupling_mismatches.as_mut().expect("set") += 1;
                    }
                }
                Err(Error::CriteriaDisagree(fc)) => {
                    sec.first_disagreement.get_or_insert(fc);
                }
                Err(e) => return Err(e),
            }
        }
        if sec.agreed != n {
            cert.fail(format!("{} of {n} samples disagree", n - sec.agreed));
        }
        if let Some(m) = sec.coupling_mismatches.filter(|m| *m > 0) {
            cert.fail(format!("coupling nondegeneracy differs from fatness on {m} samples"));
        }
        cert.samples = Some(sec.with_seed(seed));
    }
    Ok(())
}

impl SampleSection {
    fn with_seed(mut self, seed: u64) -> Self {
        if let Some(fc) = self.first_disagreement.take() {
            self.first_disagreement = Some(Box::new((*fc).with_seed(seed)));
        }
        self
    }
}

fn coupling_section(ctx: &Context, x: &[Rational], fat: bool, cert: &mut InstanceCertificate) -> Result<CouplingSection> {
    let inst = HomogeneousBundleInstance::new(ctx.emb.clone(), x.to_vec())?;
    let form = coupling_form(&inst);
    let blocks = verify_block_structure(&inst, &form)?;
    let closed = ce_closedness(inst.ambient(), &form.on_ambient(&inst)?)?;
    let top_power = if form.dim() % 2 == 0 {
        Some(nondegenerate_and_top_power(&form, form.dim() / 2)?)
    } else {
        None
    };
    let nondegenerate = top_power.as_ref().is_some_and(|t| t.nonzero);
    if !closed.is_zero() {
        cert.fail("coupling form is not closed");
    }
    if !blocks.cross_block_zero {
        cert.fail("coupling form has nonzero cross block");
    }
    if !blocks.horizontal_matches_fatness_gram {
        cert.fail("horizontal block differs from the fatness Gram");
    }
    if nondegenerate != fat {
        cert.fail("coupling nondegeneracy differs from fatness");
    }
    Ok(CouplingSection {
        n_dim: form.dim(),
        v_dim: inst.v_basis().len(),
        gram: form.gram.to_rows().iter().map(|r| scalar_strings(r)).collect(),
        blocks,
        closedness_residual: format_rational(&closed),
        top_power,
        nondegenerate,
        matches_fatness: nondegenerate == fat,
    })
}

fn run_dual(spec: &InstanceSpec, ctx: &Context, seed: u64, tol: f64, cert: &mut InstanceCertificate) -> Result<()> {
    let Family::SoPq(p, q) = ctx.family else {
        return Err(Error::UnsupportedFamily(format!("no Cartan involution for {}", ctx.family)));
    };
    let g: &LieAlgebra = ctx.emb.ambient();
    let pair = dualize(g, &CartanInvolution::ipq(p, q))?;
    let rs = RootSystem::for_family(ctx.family).ok();
    let h = ctx.emb.h_basis().to_vec();
    let rep = compare_fat_sets(&pair, &h, rs.as_ref(), spec.samples.unwrap_or(200), seed, tol)?;
    let at_xu = match &spec.xu {
        Some(xu) => {
            let t = TorusVector(parse_vec(xu)?);
            compare_fat_sets_at(&pair, &h, rs.as_ref(), &[t], tol)?.entries.pop()
        }
        None => None,
    };
    if rep.agreed != rep.samples {
        cert.fail(format!("dual fat sets differ on {} samples", rep.samples - rep.agreed));
    }
    if let Some(a) = &at_xu {
        if a.noncompact != a.compact {
            cert.fail("dual verdicts differ at X_u");
        }
    }
    cert.duality = Some(DualSection {
        dual: pair.compact_dual().name().to_string(),
        samples: rep.samples,
        agreed: rep.agreed,
        fraction: rep.fraction,
        fat_count: rep.fat_count,
        same_subsystem: rep.same_subsystem,
        counterexample: rep.counterexample,
        at_xu,
    });
    Ok(())
}

fn run_shift(spec: &InstanceSpec, ctx: Option<&Context>, tol: f64, cert: &mut InstanceCertificate) -> Result<()> {
    let s = spec
        .shift
        .as_ref()
        .ok_or_else(|| Error::Parse(format!("instance {:?} runs shift without a shift section", spec.id)))?;
    let sub = match (&s.root_system, ctx) {
        (Some(rs), _) => SubSystem::new(build_root_system(rs.root_type, rs.rank)?, s.members.clone())?,
        (None, Some(c)) => c
            .sub
            .clone()
            .ok_or_else(|| Error::TorusMismatch("no root sub-system for this pair".into()))?,
        (None, None) => return Err(Error::Parse("shift needs root_system or g and h".into())),
    };
    let vertices: Vec<TorusVector> = s
        .vertices
        .iter()
        .map(|v| parse_vec(v).map(TorusVector))
        .collect::<Result<_>>()?;
    let shift = match &s.directions {
        None => find_fat_shift(&vertices, &sub),
        Some(d) => {
            let dirs: Vec<TorusVector> = d.iter().map(|v| parse_vec(v).map(TorusVector)).collect::<Result<_>>()?;
            find_fat_shift_in(&vertices, &sub, &dirs)
        }
    };
    let verified = shift.as_ref().is_some_and(|a| verify_shift(&vertices, &sub, a));
    if shift.is_some() && !verified {
        cert.fail("returned shift fails the verifier");
    }
    if let Some(expect) = s.expect_feasible {
        if expect != shift.is_some() {
            cert.fail(format!("expected feasible={expect}, found feasible={}", shift.is_some()));
        }
    }
    let shifted_vertices = match (ctx, &shift) {
        (Some(c), Some(a)) => {
            let mut out = Vec::new();
            for v in &vertices {
                let x = c.emb.torus_element(v.add(a).coords())?;
                let fc = certify(&spec.id, &c.emb, c.sub.as_ref(), &x, tol)?;
                if coupling_nondegenerate(&c.emb, &x)? != fc.is_fat() {
                    cert.fail("shifted coupling form disagrees with fatness");
                }
                out.push(fc.verdict());
            }
            if out.iter().any(|v| !v.is_fat()) {
                cert.fail("a shifted vertex is not fat");
            }
            Some(out)
        }
        _ => None,
    };
    cert.shift = Some(ShiftSection {
        root_system: sub.parent().label(),
        forbidden: sub.forbidden().to_vec(),
        vertices: s.vertices.clone(),
        directions: s.directions.clone(),
        shift: shift.map(|a| format_vec(a.coords())),
        verified,
        shifted_vertices,
    });
    Ok(())
}

fn run_pinch(spec: &InstanceSpec, seed: u64, tol: f64, cert: &mut InstanceCertificate) -> Result<()> {
    let p = spec
        .pinch
        .as_ref()
        .ok_or_else(|| Error::Parse(format!("instance {:?} runs pinch without a pinch section", spec.id)))?;
    let generated = random_pinched(p.n, p.epsilon, p.sign, seed)?;
    let twistor = twistor_fatness(&generated.tensor, p.epsilon, p.frames, seed, tol)?;
    let bound = 3.0 / (2 * p.n + 1) as f64;
    if p.epsilon >= bound {
        cert.fail(format!("epsilon {} is not below 3/(2n+1) = {bound:.6}", p.epsilon));
    }
    if !generated.berger.pass {
        cert.fail("Berger bound violated");
    }
    if generated.estimate.epsilon_est > p.epsilon + 1e-9 {
        cert.fail("estimated pinching exceeds epsilon");
    }
    if !twistor.fat {
        cert.fail("twistor form degenerate or diagonal bound missed on some frame");
    }
    cert.pinch = Some(PinchSection {
        n: p.n,
        bound,
        generator: generated,
        twistor,
    });
    Ok(())
}

/// Certify one instance; errors are recorded in the certificate.
pub fn run_instance(spec: &InstanceSpec, seed: u64, tol: f64) -> InstanceCertificate {
    let seed = spec.seed.unwrap_or(seed);
    let tol = spec.tol.unwrap_or(tol);
    let mut cert = InstanceCertificate::new(&spec.id, seed, tol);
    cert.expect = spec.expect;
    let outcome = catch_unwind(AssertUnwindSafe(|| -> Result<()> {
        let ctx = build_context(spec, &mut cert)?;
        let triple = [Check::Roots, Check::Oracle, Check::Centralizer, Check::Coupling];
        if spec.run.iter().any(|c| triple.contains(c)) {
            let c = ctx.as_ref().ok_or_else(|| Error::Parse("fatness checks need g and h".into()))?;
            run_fatness(spec, c, seed, tol, &mut cert)?;
        }
        if spec.run.contains(&Check::Dual) {
            let c = ctx.as_ref().ok_or_else(|| Error::Parse("dual needs g and h".into()))?;
            run_dual(spec, c, seed, tol, &mut cert)?;
        }
        if spec.run.contains(&Check::Shift) {
            run_shift(spec, ctx.as_ref(), tol, &mut cert)?;
        }
        if spec.run.contains(&Check::Pinch) {
            run_pinch(spec, seed, tol, &mut cert)?;
        }
        Ok(())
    }));
    match outcome {
        Ok(Ok(())) => {}
        Ok(Err(e)) => cert.fail(format!("error: {e}")),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            cert.fail(format!("panic: {msg}"));
        }
    }
    cert.passed = cert.failures.is_empty();
    cert
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub tol: f64,
    pub seed: u64,
    pub jobs: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            out_dir: PathBuf::from("fatcert-out"),
            tol: DEFAULT_TOL,
            seed: 0,
            jobs: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub id: String,
    pub passed: bool,
    pub headline: String,
    pub path: PathBuf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub rows: Vec<SummaryRow>,
}

impl RunSummary {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn table(&self) -> String {
        let width = self.rows.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
        let mut s = String::new();
        let _ = writeln!(s, "{:<width$}  {:<6}  detail", "id", "status");
        for r in &self.rows {
            let status = if r.passed { "pass" } else { "FAIL" };
            let _ = writeln!(s, "{:<width$}  {:<6}  {}", r.id, status, r.headline);
        }
        let passed = self.rows.iter().filter(|r| r.passed).count();
        let _ = writeln!(s, "{passed}/{} instances passed", self.rows.len());
        s
    }
}

pub fn certificate_json(cert: &InstanceCertificate) -> String {
    let mut s = serde_json::to_string_pretty(cert).expect("certificates serialize");
    s.push('\n');
    s
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("certificate");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn certificate_path(out_dir: &Path, id: &str) -> PathBuf {
    let safe: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.' { c } else { '_' })
        .collect();
    out_dir.join(format!("{safe}.json"))
}

/// Certify every instance (in parallel) and write one certificate per instance.
pub fn run_catalog(specs: &[InstanceSpec], opts: &RunOptions) -> Result<RunSummary> {
    fs::create_dir_all(&opts.out_dir)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Parse(format!("thread pool: {e}")))?;
    let certs: Vec<InstanceCertificate> =
        pool.install(|| specs.par_iter().map(|s| run_instance(s, opts.seed, opts.tol)).collect());
    let mut rows = Vec::with_capacity(certs.len());
    for cert in &certs {
        let path = certificate_path(&opts.out_dir, &cert.instance);
        write_atomic(&path, &certificate_json(cert))?;
        rows.push(SummaryRow {
            id: cert.instance.clone(),
            passed: cert.passed,
            headline: cert.headline(),
            path,
        });
    }
    Ok(RunSummary { rows })
}

/// Resolve a catalog argument: an existing file, else a builtin name.
pub fn resolve_catalog(arg: &str) -> Result<Vec<InstanceSpec>> {
    let path = Path::new(arg);
    if path.is_file() {
        return load_catalog(path);
    }
    builtin_catalog(arg).ok_or_else(|| Error::Parse(format!("{arg:?} is neither a catalog file nor a builtin")))
}

/// Human-readable report for a certificate on disk; falls back to running
/// the builtin instance of that id.
pub fn explain(id: &str, out_dir: &Path) -> Result<String> {
    let path = certificate_path(out_dir, id);
    let value: serde_json::Value = if path.is_file() {
        serde_json::from_str(&fs::read_to_string(&path)?).map_err(|e| Error::Parse(e.to_string()))?
    } else {
        let spec = BUILTINS
            .iter()
            .filter_map(|(name, _)| builtin_catalog(name))
            .flatten()
            .find(|s| s.id == id)
            .ok_or_else(|| Error::UnknownInstance(id.to_string()))?;
        serde_json::to_value(run_instance(&spec, 0, DEFAULT_TOL)).expect("certificates serialize")
    };
    Ok(render(&value))
}

fn render(v: &serde_json::Value) -> String {
    use serde_json::Value;
    let mut s = String::new();
    let text = |v: &Value| match v {
        Value::String(x) => x.clone(),
        other => other.to_string(),
    };
    let list = |v: &Value| -> String {
        v.as_array()
            .map(|a| a.iter().map(text).collect::<Vec<_>>().join(", "))
            .unwrap_or_default()
    };
    let root = |r: &Value| -> String {
        let coeffs: Vec<i64> = r.as_array().map(|a| a.iter().filter_map(Value::as_i64).collect()).unwrap_or_default();
        root_name(&coeffs)
    };
    let _ = writeln!(s, "instance {}", text(&v["instance"]));
    let _ = writeln!(
        s,
        "status   {}",
        if v["passed"].as_bool() == Some(true) { "pass" } else { "FAIL" }
    );
    for f in v["failures"].as_array().into_iter().flatten() {
        let _ = writeln!(s, "  failure: {}", text(f));
    }
    if let Some(a) = v.get("algebra") {
        let _ = writeln!(
            s,
            "\n{}: dim {}, h dim {}, m dim {}, torus rank {}",
            text(&a["g"]),
            a["dim"],
            a["h_dim"],
            a["m_dim"],
            a["rank"]
        );
        if let Some(rs) = a.get("root_system") {
            let _ = writeln!(s, "root system {}", text(rs));
            let names = |k: &str| a[k].as_array().map(|r| r.iter().map(root).collect::<Vec<_>>().join(", ")).unwrap_or_default();
            let _ = writeln!(s, "  roots of h:       {}", names("members"));
            let _ = writeln!(s, "  forbidden walls:  {}", names("forbidden"));
        }
        if let Some(n) = a.get("root_note") {
            let _ = writeln!(s, "root test unavailable: {}", text(n));
        }
    }
    if let Some(xu) = v.get("Xu_torus") {
        let _ = writeln!(s, "\nX_u (torus coordinates) = ({})", list(xu));
    }
    if let Some(walls) = v.get("walls").and_then(Value::as_array) {
        let _ = writeln!(s, "wall values alpha(X_u):");
        for w in walls {
            let _ = writeln!(s, "  {:>12}  {}", root(&w["root"]), text(&w["value"]));
        }
    }
    if let Some(vd) = v.get("verdicts") {
        let _ = writeln!(
            s,
            "verdicts: roots {}, oracle {}, centralizer {}",
            text(&vd["roots"]),
            text(&vd["oracle"]),
            text(&vd["centralizer"])
        );
        let _ = writeln!(s, "Gram singular values: {}", list(&v["singular_values"]));
        let _ = writeln!(s, "centralizer dimension: {}", v["centralizer_dim"]);
        let w = &v["witnesses"];
        if let Some(r) = w.get("root") {
            let _ = writeln!(s, "vanishing root: {}", root(r));
        }
        if let Some(n) = w.get("null_vector") {
            let _ = writeln!(s, "null vector in m: ({})", list(n));
        }
        if w.get("odd_dimension").and_then(Value::as_bool) == Some(true) {
            let _ = writeln!(s, "odd-dimensional m");
        }
    }
    if let Some(sm) = v.get("samples") {
        let _ = writeln!(
            s,
            "samples: {} ({} fat, {} not fat), {} agreed",
            sm["count"], sm["fat"], sm["not_fat"], sm["agreed"]
        );
    }
    if let Some(c) = v.get("coupling") {
        let b = &c["blocks"];
        let _ = writeln!(
            s,
            "\ncoupling form on n (dim {}, v dim {}): vertical {} + horizontal {}",
            c["n_dim"], c["v_dim"], b["vertical_dim"], b["horizontal_dim"]
        );
        let _ = writeln!(s, "  cross block zero: {}", b["cross_block_zero"]);
        let _ = writeln!(s, "  vertical block nondegenerate: {}", b["vertical_nondegenerate"]);
        let _ = writeln!(s, "  horizontal block = fatness Gram: {}", b["horizontal_matches_fatness_gram"]);
        if let Some(r) = b.get("curvature_to_horizontal_ratio").filter(|r| !r.is_null()) {
            let _ = writeln!(s, "  curvature pairing / horizontal block: {}", text(r));
        }
        let _ = writeln!(s, "  closedness residual: {}", text(&c["closedness_residual"]));
        if let Some(tp) = c.get("top_power").filter(|t| !t.is_null()) {
            let _ = writeln!(s, "  Pfaffian: {}", text(&tp["pfaffian"]));
        }
    }
    if let Some(d) = v.get("duality") {
        let _ = writeln!(
            s,
            "\ncompact dual {}: {}/{} samples agree ({} fat)",
            text(&d["dual"]),
            d["agreed"],
            d["samples"],
            d["fat_count"]
        );
    }
    if let Some(sh) = v.get("shift") {
        let _ = writeln!(s, "\nshift search over {} with forbidden roots {}", text(&sh["root_system"]), {
            sh["forbidden"].as_array().map(|r| r.iter().map(root).collect::<Vec<_>>().join(", ")).unwrap_or_default()
        });
        match sh["shift"].as_array() {
            Some(a) => {
                let _ = writeln!(s, "  shift a = ({}), verified {}", a.iter().map(text).collect::<Vec<_>>().join(", "), sh["verified"]);
            }
            None => {
                let _ = writeln!(s, "  no admissible shift");
            }
        }
    }
    if let Some(p) = v.get("pinch") {
        let t = &p["twistor"];
        let _ = writeln!(
            s,
            "\npinched tensor n={} epsilon={} sign {}: estimated epsilon {}, max mixed entry {}",
            p["n"],
            p["generator"]["epsilon"],
            text(&p["generator"]["sign"]),
            p["generator"]["estimate"]["epsilon_est"],
            p["generator"]["berger"]["max_mixed"]
        );
        let _ = writeln!(s, "diagonal bound 1 - (2n+1)eps/3 = {}", t["bound"]);
        let _ = writeln!(s, "{:>6}  {:>12}  {:>12}  {}", "frame", "min|diag|", "min sv", "ok");
        for f in t["frames"].as_array().into_iter().flatten() {
            let ok = f["nondegenerate"].as_bool() == Some(true) && f["diagonal_ok"].as_bool() == Some(true);
            let _ = writeln!(
                s,
                "{:>6}  {:>12.6}  {:>12.6}  {}",
                f["frame"].as_u64().unwrap_or_default(),
                f["min_abs_diagonal"].as_f64().unwrap_or(f64::NAN),
                f["min_sv"].as_f64().unwrap_or(f64::NAN),
                ok
            );
        }
    }
    s
}

/// `t1-t2`, `2t3`, `-t1` style names.
pub fn root_name(r: &[i64]) -> String {
    let mut s = String::new();
    for (i, &c) in r.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 { "-" } else if s.is_empty() { "" } else { "+" };
        let mag = if c.abs() == 1 { String::new() } else { c.abs().to_string() };
        let _ = write!(s, "{sign}{mag}t{}", i + 1);
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

#[cfg(test)]
mod tests;
