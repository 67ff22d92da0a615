use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde_json::Value;
use singlab_core::cone::{curvature_on_graph, make_lawson_cone, ConeSpec};
use singlab_core::linalg::EigenOptions;
use singlab_core::metric::uniformity::{fit_skin_uniformity, metric_inequality_suite};
use singlab_core::metric::{
    attach_density, build_phi_chain, build_space, classify_boundary_rays, estimate_delta, euclidean_grid, random_tree,
    validate_phi_chain, ChainKind, DensityField, DensitySpec, DomainSpec, PathMetric, PhiFunction, RayLabel, RayOptions,
    SampledSpace, VertexRole,
};
use singlab_core::potential::{
    bhp_ratio, criticality_classify, disk, discretize, fatou_experiment, green_function, half_disk, hardy_model,
    log_slope, martin_sequence, minimal_growth_check, oscillation_decay, solve_dirichlet, weighted_principal_eigenvalue,
    Criticality, DiscreteMeasure, GridDomain, GridFunction, GridSystem, NodeClass, OperatorSpec, CRITICAL_BAND,
};
use singlab_core::spectral::{
    attractor_limit_check, build_fixed_point_solution, eta_sequence, fit_branch_exponent, indicial_exponents,
    jacobi_exponents_real, largest_passing_lambda, link_principal_eigenvalue, scaling_action, shifted_bounds_check,
    theorem12_bounds_check, theorem12_largest_lambda, Branch, BoundsReport, Direction, LinkOperatorSpec, PotentialKind,
    RecordTerm, SolutionRecord,
};

use crate::error::{param_error, CliError};
use crate::manifest::Experiment;
use crate::report::Report;

/// Typed access to an experiment's parameters that remembers what was read.
struct Ctx<'a> {
    e: &'a Experiment,
    params: BTreeSet<String>,
    tolerances: BTreeSet<String>,
    resolutions: bool,
}

impl<'a> Ctx<'a> {
    fn new(e: &'a Experiment) -> Self {
        Self { e, params: BTreeSet::new(), tolerances: BTreeSet::new(), resolutions: false }
    }

    fn raw(&mut self, key: &str) -> Option<&'a Value> {
        self.params.insert(key.to_string());
        self.e.params.get(key)
    }

    fn f64(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.as_f64().ok_or_else(|| param_error(key, format!("expected a number, found {v}"))),
        }
    }

    fn usize(&mut self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| param_error(key, format!("expected a non-negative integer, found {v}"))),
        }
    }

    fn str(&mut self, key: &str, default: &str) -> Result<String, CliError> {
        match self.raw(key) {
            None => Ok(default.to_string()),
            Some(v) => v.as_str().map(str::to_string).ok_or_else(|| param_error(key, format!("expected a string, found {v}"))),
        }
    }

    fn bool(&mut self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.as_bool().ok_or_else(|| param_error(key, format!("expected true or false, found {v}"))),
        }
    }

    fn f64s(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| param_error(key, format!("expected numbers, found {v}"))))
                .collect(),
            Some(v) => v.as_f64().map(|x| vec![x]).ok_or_else(|| param_error(key, format!("expected a list of numbers, found {v}"))),
        }
    }

    fn point(&mut self, key: &str, default: [f64; 2]) -> Result<[f64; 2], CliError> {
        let v = self.f64s(key, &default)?;
        <[f64; 2]>::try_from(v.as_slice()).map_err(|_| param_error(key, "expected two coordinates"))
    }

    fn tol(&mut self, name: &str, default: f64) -> f64 {
        self.tolerances.insert(name.to_string());
        self.e.tolerances.get(name).copied().unwrap_or(default)
    }

    fn resolutions(&mut self, default: &[usize]) -> Result<Vec<usize>, CliError> {
        self.resolutions = true;
        let r = self.e.resolutions.clone().unwrap_or_else(|| default.to_vec());
        if r.is_empty() {
            return Err(param_error("resolutions", "must not be empty"));
        }
        Ok(r)
    }

    fn resolution(&mut self, default: usize) -> Result<usize, CliError> {
        let r = self.resolutions(&[default])?;
        if r.len() != 1 {
            return Err(param_error("resolutions", format!("kind '{}' takes a single resolution", self.e.kind)));
        }
        Ok(r[0])
    }

    /// Rejects parameters, tolerances and resolutions nobody read.
    fn finish(&self) -> Result<(), CliError> {
        if let Some(k) = self.e.params.keys().find(|k| !self.params.contains(*k)) {
            return Err(param_error(k, format!("not used by kind '{}'", self.e.kind)));
        }
        if let Some(k) = self.e.tolerances.keys().find(|k| !self.tolerances.contains(*k)) {
            return Err(CliError::Parse(format!("tolerance '{k}' is not used by kind '{}'", self.e.kind)));
        }
        if self.e.resolutions.is_some() && !self.resolutions {
            return Err(CliError::Parse(format!("kind '{}' takes no resolutions", self.e.kind)));
        }
        Ok(())
    }
}

/// Runs one experiment; `index` names it when it has no id.
pub fn run_experiment(e: &Experiment, index: usize) -> Result<Report, CliError> {
    let mut ctx = Ctx::new(e);
    let mut r = Report::new(e.label(index), e);
    match e.kind.as_str() {
        "delta-estimate" => delta_estimate(&mut ctx, &mut r)?,
        "metric-suite" => metric_suite(&mut ctx, &mut r)?,
        "phi-chain" => phi_chain(&mut ctx, &mut r)?,
        "boundary-rays" => boundary_rays(&mut ctx, &mut r)?,
        "cone-exponents" => cone_exponents(&mut ctx, &mut r)?,
        "thm12-scan" => thm12_scan(&mut ctx, &mut r)?,
        "shifted-scan" => shifted_scan(&mut ctx, &mut r)?,
        "scaling-attractor" => scaling_attractor(&mut ctx, &mut r)?,
        "hardy" => hardy(&mut ctx, &mut r)?,
        "green" => green(&mut ctx, &mut r)?,
        "martin" => martin(&mut ctx, &mut r)?,
        "bhp" => bhp(&mut ctx, &mut r)?,
        "oscillation" => oscillation(&mut ctx, &mut r)?,
        "dirichlet" => dirichlet(&mut ctx, &mut r)?,
        "criticality" => criticality(&mut ctx, &mut r)?,
        "fatou" => fatou(&mut ctx, &mut r)?,
        "minimal-growth" => minimal_growth(&mut ctx, &mut r)?,
        other => return Err(CliError::Parse(format!("unknown experiment kind '{other}'"))),
    }
    Ok(r)
}

fn cone_from(ctx: &mut Ctx) -> Result<ConeSpec, CliError> {
    let p = ctx.usize("p", 3)?;
    let q = ctx.usize("q", 3)?;
    Ok(make_lawson_cone(p, q)?)
}

struct ConeGraph {
    p: usize,
    q: usize,
    r_min: f64,
    r_max: f64,
    link_steps: usize,
    skin: f64,
}

impl ConeGraph {
    fn read(ctx: &mut Ctx, r_min: f64) -> Result<Self, CliError> {
        Ok(Self {
            p: ctx.usize("p", 3)?,
            q: ctx.usize("q", 3)?,
            r_min: ctx.f64("r_min", r_min)?,
            r_max: ctx.f64("r_max", 100.0)?,
            link_steps: ctx.usize("link_steps", 16)?,
            skin: ctx.f64("skin_lambda", 1.0)?,
        })
    }

    fn build(&self, rings: usize) -> Result<(SampledSpace, DensityField), CliError> {
        let spec = DomainSpec::LawsonCone { p: self.p, q: self.q, r_min: self.r_min, r_max: self.r_max, link_steps: self.link_steps };
        let s = build_space(&spec, rings)?;
        let curvature = curvature_on_graph(&make_lawson_cone(self.p, self.q)?, &s)?;
        let d = attach_density(&s, &DensitySpec::SkinModel { curvature, lambda: self.skin })?;
        Ok((s, d))
    }
}

fn punctured_disk(inner: f64, res: usize) -> Result<(SampledSpace, DensityField), CliError> {
    let s = build_space(&DomainSpec::PuncturedDisk { inner_radius: inner }, res)?;
    let d = attach_density(&s, &DensitySpec::InvDistSigma)?;
    Ok((s, d))
}

fn rel_spread(xs: &[f64]) -> f64 {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi / lo - 1.0
}

fn delta_estimate(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let domain = ctx.str("domain", "punctured-disk")?;
    let quadruples = ctx.usize("quadruples", 20_000)?;
    let triangles = ctx.usize("triangles", 100)?;
    let seed = ctx.e.seed;
    let spaces: Vec<(usize, SampledSpace, DensityField)>;
    match domain.as_str() {
        "punctured-disk" => {
            let inner = ctx.f64("inner_radius", 0.01)?;
            let tol = ctx.tol("self_convergence", 0.15);
            let res = ctx.resolutions(&[64, 128, 256])?;
            ctx.finish()?;
            spaces = res.iter().map(|&n| punctured_disk(inner, n).map(|(s, d)| (n, s, d))).collect::<Result<_, _>>()?;
            let deltas = run_deltas(&spaces, quadruples, triangles, seed, r);
            let steps_ok = deltas.windows(2).all(|w| ((w[1].0 - w[0].0) / w[1].0).abs() <= tol)
                && deltas.windows(2).all(|w| ((w[1].1 - w[0].1) / w[1].1).abs() <= tol);
            r.check("self_convergence", steps_ok);
        }
        "grid" => {
            let res = ctx.resolutions(&[8, 16, 32])?;
            ctx.finish()?;
            spaces = res
                .iter()
                .map(|&n| {
                    let s = euclidean_grid(n)?;
                    let d = DensityField::constant(&s, 1.0)?;
                    Ok::<_, CliError>((n, s, d))
                })
                .collect::<Result<_, _>>()?;
            let deltas = run_deltas(&spaces, quadruples, triangles, seed, r);
            r.check("grows_with_diameter", deltas.windows(2).all(|w| w[1].0 > w[0].0));
        }
        "tree" => {
            let res = ctx.resolutions(&[50, 200])?;
            ctx.finish()?;
            spaces = res
                .iter()
                .map(|&n| {
                    let s = random_tree(n, seed)?;
                    let d = DensityField::constant(&s, 1.0)?;
                    Ok::<_, CliError>((n, s, d))
                })
                .collect::<Result<_, _>>()?;
            let deltas = run_deltas(&spaces, quadruples, triangles, seed, r);
            r.check("zero_on_trees", deltas.iter().all(|d| d.0 == 0.0));
        }
        "cone" => {
            let g = ConeGraph::read(ctx, 0.01)?;
            let res = ctx.resolutions(&[64])?;
            ctx.finish()?;
            spaces = res.iter().map(|&n| g.build(n).map(|(s, d)| (n, s, d))).collect::<Result<_, _>>()?;
            run_deltas(&spaces, quadruples, triangles, seed, r);
        }
        other => return Err(param_error("domain", format!("unknown domain '{other}'"))),
    }
    Ok(())
}

fn run_deltas(
    spaces: &[(usize, SampledSpace, DensityField)],
    quadruples: usize,
    triangles: usize,
    seed: u64,
    r: &mut Report,
) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut series = Vec::new();
    for (n, s, d) in spaces {
        let rep = estimate_delta(s, d, quadruples, triangles, seed);
        r.scalar(format!("delta_fourpoint_{n}"), rep.delta_fourpoint);
        r.scalar(format!("delta_thin_triangles_{n}"), rep.delta_thin_triangles);
        r.scalar(format!("vertices_{n}"), s.len() as f64);
        series.push([*n as f64, rep.delta_fourpoint]);
        out.push((rep.delta_fourpoint, rep.delta_thin_triangles));
    }
    r.series("delta_vs_resolution", series);
    out
}

fn metric_suite(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let domain = ctx.str("domain", "punctured-disk")?;
    let pairs = ctx.usize("pairs", 1000)?;
    let fit_pairs = ctx.usize("fit_pairs", 100)?;
    let slack = ctx.tol("slack", 0.05);
    let res = ctx.resolution(256)?;
    let (s, d, radial) = match domain.as_str() {
        "punctured-disk" => {
            let inner = ctx.f64("inner_radius", 0.01)?;
            let radii = ctx.f64s("radial_pair", &[0.05, 0.8])?;
            let tol = ctx.tol("radial", 0.02);
            if radii.len() != 2 || !(radii[0] > 0.0 && radii[1] > radii[0]) {
                return Err(param_error("radial_pair", "expected two increasing radii"));
            }
            ctx.finish()?;
            let (s, d) = punctured_disk(inner, res)?;
            (s, d, Some((radii[0], radii[1], tol)))
        }
        "cone" => {
            let g = ConeGraph::read(ctx, 0.01)?;
            ctx.finish()?;
            let (s, d) = g.build(res)?;
            (s, d, None)
        }
        other => return Err(param_error("domain", format!("unknown domain '{other}'"))),
    };
    let seed = ctx.e.seed;
    let a = fit_skin_uniformity(&s, &d, fit_pairs, seed);
    r.scalar("a", a);
    r.scalar("vertices", s.len() as f64);
    let rep = metric_inequality_suite(&s, &d, pairs, a, seed, slack)?;
    r.scalar("pairs", rep.pairs as f64);
    r.scalar("lipschitz", rep.lipschitz);
    for c in &rep.checks {
        r.scalar(format!("worst_ratio:{}", c.name), c.worst_ratio);
        r.scalar(format!("violations:{}", c.name), c.violations as f64);
        r.check(c.name.clone(), c.violations == 0);
    }
    if let Some((r1, r2, tol)) = radial {
        let m = PathMetric::conformal(&s, &d);
        let (x, y) = (s.nearest_vertex(&[r1, 0.0]), s.nearest_vertex(&[r2, 0.0]));
        let got = m.distance(x, y)?;
        let expected = (s.coords(y)[0].hypot(s.coords(y)[1]) / s.coords(x)[0].hypot(s.coords(x)[1])).ln();
        r.scalar("radial_distance", got);
        r.scalar("radial_log_ratio", expected);
        r.check("radial_log", (got / expected - 1.0).abs() <= tol);
    }
    Ok(())
}

fn phi_chain(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let which = ctx.str("chain", "both")?;
    let kinds: Vec<ChainKind> = match which.as_str() {
        "both" => vec![ChainKind::Halfspace, ChainKind::GromovProduct],
        "halfspace" => vec![ChainKind::Halfspace],
        "gromov-product" => vec![ChainKind::GromovProduct],
        other => return Err(param_error("chain", format!("unknown chain kind '{other}'"))),
    };
    let mut deltas = Vec::new();
    for k in &kinds {
        deltas.push(match k {
            ChainKind::Halfspace => ctx.f64("delta_halfspace", 0.9)?,
            ChainKind::GromovProduct => ctx.f64("delta_gromov", 2.1)?,
        });
    }
    let levels = ctx.usize("levels", 3)?;
    let measure = ctx.bool("measure_delta", false)?;
    let g = ConeGraph::read(ctx, 1e-12)?;
    let rings = ctx.resolution(240)?;
    ctx.finish()?;
    let phi0 = PhiFunction { kind: ChainKind::Halfspace, delta: 1.0 }.eval(0.0);
    r.scalar("phi_halfspace_at_zero_delta1", phi0);
    r.check("phi_at_zero", phi0 == 1.0 / 22.0);
    let (s, d) = g.build(rings)?;
    let m = PathMetric::conformal(&s, &d);
    let tip = (0..s.len())
        .filter(|&v| s.role(v) == VertexRole::SigmaCollar)
        .min_by(|&a, &b| m.distance(s.basepoint(), a).unwrap_or(f64::INFINITY).total_cmp(&m.distance(s.basepoint(), b).unwrap_or(f64::INFINITY)))
        .ok_or_else(|| param_error("r_min", "cone graph has no vertices next to the tip"))?;
    let ray = m.geodesic(s.basepoint(), tip)?;
    r.scalar("ray_length", ray.conformal_length);
    for (kind, delta) in kinds.iter().zip(&deltas) {
        let name = match kind {
            ChainKind::Halfspace => "halfspace",
            ChainKind::GromovProduct => "gromov_product",
        };
        let chain = build_phi_chain(&m, &ray, *kind, *delta, levels)?;
        let v = validate_phi_chain(&chain, &m)?;
        r.scalar(format!("{name}_delta"), *delta);
        r.scalar(format!("{name}_c0"), chain.c0);
        for l in &v.levels {
            if let Some(sp) = l.spacing {
                r.scalar(format!("{name}_spacing_{}", l.level), sp);
            }
            r.scalar(format!("{name}_separation_margin_{}", l.level), l.separation_margin);
        }
        r.check(format!("{name}_valid"), v.pass);
    }
    if measure {
        let h = estimate_delta(&s, &d, 20_000, 100, ctx.e.seed);
        r.scalar("measured_delta_fourpoint", h.delta_fourpoint);
        r.scalar("measured_delta_thin_triangles", h.delta_thin_triangles);
    }
    Ok(())
}

fn boundary_rays(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let count = ctx.usize("rays", 50)?;
    let factor = ctx.f64("divergence_factor", RayOptions::default().divergence_factor)?;
    let g = ConeGraph::read(ctx, 0.01)?;
    let rings = ctx.resolution(256)?;
    ctx.finish()?;
    let (s, d) = g.build(rings)?;
    let c = classify_boundary_rays(&s, &d, count, ctx.e.seed, RayOptions { divergence_factor: factor });
    let (sig, inf, un) =
        (c.count(RayLabel::SigmaDirected), c.count(RayLabel::InfinityDirected), c.count(RayLabel::Unresolved));
    r.scalar("rays", c.rays.len() as f64);
    r.scalar("sigma_directed", sig as f64);
    r.scalar("infinity_directed", inf as f64);
    r.scalar("unresolved", un as f64);
    r.check("all_labelled", sig + inf == c.rays.len());
    r.check("both_classes", sig > 0 && inf > 0);
    Ok(())
}

fn potential_kind(ctx: &mut Ctx) -> Result<PotentialKind, CliError> {
    let name = ctx.str("potential", "jacobi")?;
    Ok(match name.as_str() {
        "jacobi" => PotentialKind::Jacobi,
        "conformal" => PotentialKind::Conformal,
        "base" => PotentialKind::Base,
        "shifted" => PotentialKind::ShiftedConformal(ctx.usize("m", 9)?),
        "custom" => PotentialKind::Custom(ctx.f64("v", 0.0)?),
        other => return Err(param_error("potential", format!("unknown potential '{other}'"))),
    })
}

fn cone_exponents(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let cone = cone_from(ctx)?;
    let kind = potential_kind(ctx)?;
    let lambda = ctx.f64("lambda", 0.0)?;
    let nodes = ctx.usize("nodes", 1000)?;
    let r_min = ctx.f64("r_min", 0.5)?;
    let r_max = ctx.f64("r_max", 2.0)?;
    let tol = ctx.tol("fit", 1e-3);
    ctx.finish()?;
    let op = LinkOperatorSpec::new(cone, kind, lambda)?;
    let mu = link_principal_eigenvalue(&op)?.mu;
    let ind = indicial_exponents(mu, cone.n)?;
    r.scalar("n", cone.n as f64);
    r.scalar("mu", mu);
    r.scalar("discriminant", ind.discriminant);
    r.scalar("alpha_plus", ind.alpha_plus);
    r.scalar("alpha_minus", ind.alpha_minus);
    for (b, exact, name) in [(Branch::Plus, ind.alpha_plus, "plus"), (Branch::Minus, ind.alpha_minus, "minus")] {
        let fit = fit_branch_exponent(&op, b, r_min, r_max, nodes)?;
        r.scalar(format!("fit_{name}"), fit.alpha);
        r.scalar(format!("fit_{name}_residual"), fit.max_residual);
        r.check(format!("fit_{name}"), (fit.alpha - exact).abs() <= tol);
    }
    let threshold = (3..=9).all(|n| jacobi_exponents_real(n) == (n >= 7));
    r.check("stability_threshold", threshold);
    if let Some(w) = cone.warning() {
        r.note(w);
    }
    Ok(())
}

fn record_bounds(r: &mut Report, rep: &BoundsReport) {
    r.scalar("lambda", rep.lambda);
    r.scalar("mu", rep.mu);
    r.scalar("alpha_plus", rep.alpha_plus);
    r.scalar("alpha_minus", rep.alpha_minus);
    for c in &rep.checks {
        r.scalar(format!("{}:value", c.name), c.value);
        r.scalar(format!("{}:bound", c.name), c.bound);
        r.check(c.name.clone(), c.pass);
    }
}

fn thm12_scan(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let cone = cone_from(ctx)?;
    let lambda = ctx.f64("lambda", 0.01)?;
    let tol = ctx.tol("bisection", 1e-4);
    ctx.finish()?;
    record_bounds(r, &theorem12_bounds_check(&cone, lambda)?);
    let best = theorem12_largest_lambda(&cone)?;
    r.scalar("largest_lambda", best);
    let bracket = theorem12_bounds_check(&cone, best - tol)?.all_pass() && !theorem12_bounds_check(&cone, best + tol)?.all_pass();
    r.check("largest_lambda_bracket", bracket);
    Ok(())
}

fn shifted_scan(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let cone = cone_from(ctx)?;
    let m = ctx.usize("m", 9)?;
    let lambda = ctx.f64("lambda", 0.01)?;
    ctx.finish()?;
    record_bounds(r, &shifted_bounds_check(&cone, m, lambda)?);
    let best = largest_passing_lambda(|l| Ok(shifted_bounds_check(&cone, m, l)?.all_pass()), 1e-9)?;
    r.scalar("largest_lambda", best);
    Ok(())
}

fn scaling_attractor(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let cone = cone_from(ctx)?;
    let kind = potential_kind(ctx)?;
    let lambda = ctx.f64("lambda", 0.0)?;
    let steps = ctx.usize("steps", 12)?;
    let coeffs = ctx.f64s("coefficients", &[1.0, 1.0])?;
    let etas = ctx.f64s("group_etas", &[1e-3, 0.5, 3.0, 40.0])?;
    ctx.finish()?;
    if coeffs.len() != 2 {
        return Err(param_error("coefficients", "expected [minus, plus]"));
    }
    let op = LinkOperatorSpec::new(cone, kind, lambda)?;
    let plus = build_fixed_point_solution(&op, Branch::Plus)?;
    let minus = build_fixed_point_solution(&op, Branch::Minus)?;
    r.scalar("alpha_plus", plus.alpha);
    r.scalar("alpha_minus", minus.alpha);

    let monomials = [
        SolutionRecord::from_solutions(&[(1.0, plus)]),
        SolutionRecord::from_solutions(&[(1.0, minus)]),
        SolutionRecord { terms: vec![RecordTerm { coeff: 3.0, alpha: 0.5 * (plus.alpha + minus.alpha), branch: None }] },
    ];
    let mut group = true;
    for rec in &monomials {
        for &a in &etas {
            for &b in &etas {
                group &= scaling_action(&scaling_action(rec, b)?, a)? == scaling_action(rec, a * b)?;
            }
        }
    }
    r.check("group_law", group);
    let mut fixed = true;
    for rec in &monomials[..2] {
        for &a in &etas {
            fixed &= scaling_action(rec, a)? == *rec;
        }
    }
    r.check("fixed_points", fixed);

    let mixed = SolutionRecord::from_solutions(&[(coeffs[0], minus), (coeffs[1], plus)]);
    let label = |b: Option<Branch>| match b {
        Some(Branch::Plus) => 1.0,
        Some(Branch::Minus) => -1.0,
        None => 0.0,
    };
    let to_zero = attractor_limit_check(&mixed, &eta_sequence(Direction::ToZero, steps))?;
    let to_inf = attractor_limit_check(&mixed, &eta_sequence(Direction::ToInfinity, steps))?;
    r.scalar("limit_to_zero", label(to_zero.limit));
    r.scalar("limit_to_infinity", label(to_inf.limit));
    r.check("minus_as_eta_to_zero", to_zero.limit == Some(Branch::Minus));
    r.check("plus_as_eta_to_infinity", to_inf.limit == Some(Branch::Plus));
    r.note("limit codes: 1 = PLUS, -1 = MINUS, 0 = none");
    Ok(())
}

fn exhaustion_opts(ctx: &mut Ctx) -> Result<EigenOptions, CliError> {
    let d = EigenOptions::default();
    Ok(EigenOptions {
        max_iterations: ctx.usize("max_iterations", d.max_iterations)?,
        tolerance: ctx.tol("eigen", d.tolerance),
    })
}

fn class_code(c: Criticality) -> f64 {
    match c {
        Criticality::Subcritical => -1.0,
        Criticality::Critical => 0.0,
        Criticality::Supercritical => 1.0,
    }
}

fn hardy(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let nodes = ctx.usize("nodes", 1000)?;
    let lengths = ctx.f64s("log_lengths", &[5.0, 10.0, 15.0, 20.0, 25.0, 30.0])?;
    let probes = ctx.f64s("lambdas", &[0.1, 0.25, 0.5])?;
    let band = ctx.f64("band", CRITICAL_BAND)?;
    let opts = exhaustion_opts(ctx)?;
    let est_tol = ctx.tol("estimate", 0.05);
    let slope_tol = ctx.tol("slope", 0.05);
    ctx.finish()?;
    let h = hardy_model(nodes, &lengths)?;
    let rep = weighted_principal_eigenvalue(&h.system, &h.exhaustion, Some(&h.scales), h.basepoint, opts)?;
    r.series("lambda_m", rep.lambdas.iter().enumerate().map(|(m, l)| [(m + 1) as f64, *l]).collect());
    for (l, lam) in h.scales.iter().zip(&rep.lambdas) {
        r.scalar(format!("lambda_L{l}"), *lam);
    }
    r.scalar("estimate", rep.estimate);
    r.check("strictly_decreasing", rep.strictly_decreasing);
    r.check("estimate", (rep.estimate / 0.25 - 1.0).abs() <= est_tol);
    for lambda in probes {
        let c = criticality_classify(&h.system, &h.exhaustion, &rep, lambda, band, h.basepoint, opts)?;
        r.scalar(format!("class_{lambda}"), class_code(c.class));
        if let Some(g) = c.green_min {
            r.scalar(format!("green_min_{lambda}"), g);
        }
        if let Some(w) = c.witness_eigenvalue {
            r.scalar(format!("witness_{lambda}"), w);
        }
        r.check(format!("verified_{lambda}"), c.verified);
        let expected = if lambda < 0.25 - band {
            Criticality::Subcritical
        } else if lambda > 0.25 + band {
            Criticality::Supercritical
        } else {
            Criticality::Critical
        };
        r.check(format!("class_{lambda}"), c.class == expected);
    }
    let l = *lengths.last().expect("non-empty");
    let slope = log_slope(&h.system, &rep.ground_state, (-2.0 * l / 3.0).exp(), (-l / 3.0).exp())?;
    r.scalar("ground_state_log_slope", slope);
    r.check("log_slope", (slope / 0.5 - 1.0).abs() <= slope_tol);
    r.note("class codes: -1 = SUBCRITICAL, 0 = CRITICAL, 1 = SUPERCRITICAL");
    Ok(())
}

fn criticality(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let nodes = ctx.usize("nodes", 1000)?;
    let lengths = ctx.f64s("log_lengths", &[5.0, 10.0, 15.0, 20.0, 25.0, 30.0])?;
    let lambda = ctx.f64("lambda", 0.25)?;
    let band = ctx.f64("band", CRITICAL_BAND)?;
    let expect = ctx.str("expect", "")?;
    let opts = exhaustion_opts(ctx)?;
    ctx.finish()?;
    let expected = match expect.to_ascii_uppercase().as_str() {
        "" => None,
        "SUBCRITICAL" => Some(Criticality::Subcritical),
        "CRITICAL" => Some(Criticality::Critical),
        "SUPERCRITICAL" => Some(Criticality::Supercritical),
        other => return Err(param_error("expect", format!("unknown class '{other}'"))),
    };
    let h = hardy_model(nodes, &lengths)?;
    let rep = weighted_principal_eigenvalue(&h.system, &h.exhaustion, Some(&h.scales), h.basepoint, opts)?;
    r.series("lambda_m", rep.lambdas.iter().enumerate().map(|(m, l)| [(m + 1) as f64, *l]).collect());
    let c = criticality_classify(&h.system, &h.exhaustion, &rep, lambda, band, h.basepoint, opts)?;
    r.scalar("estimate", c.estimate);
    r.scalar("lambda", c.lambda);
    r.scalar("band", c.band);
    r.scalar("class", class_code(c.class));
    if let Some(g) = c.green_min {
        r.scalar("green_min", g);
    }
    if let Some(w) = c.witness_eigenvalue {
        r.scalar("witness_eigenvalue", w);
    }
    r.note(format!("class: {}", serde_json::to_value(c.class).expect("serializes").as_str().unwrap_or_default()));
    r.check("strictly_decreasing", rep.strictly_decreasing);
    r.check("verified", c.verified);
    if let Some(e) = expected {
        r.check("expected_class", c.class == e);
    }
    Ok(())
}

fn laplace(d: &GridDomain) -> Result<GridSystem, CliError> {
    Ok(discretize(d, &OperatorSpec::laplacian())?)
}

fn disk_green(x: &[f64], y: &[f64]) -> f64 {
    let (x1, x2, y1, y2) = (x[0], x[1], y[0], y[1]);
    let num = (1.0 - (x1 * y1 + x2 * y2)).powi(2) + (x1 * y2 - x2 * y1).powi(2);
    let den = (x1 - y1).powi(2) + (x2 - y2).powi(2);
    (num / den).ln() / (4.0 * PI)
}

fn green(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let domain = ctx.str("domain", "disk")?;
    let pole = ctx.point("pole", [0.3, 0.2])?;
    let samples = ctx.usize("symmetry_pairs", 20)?;
    let away = ctx.f64("oracle_distance", 0.25)?;
    let sym_tol = ctx.tol("symmetry", 1e-10);
    let oracle_tol = ctx.tol("oracle", 0.02);
    let res = ctx.resolution(64)?;
    ctx.finish()?;
    let d = match domain.as_str() {
        "disk" => disk(res)?,
        "half-disk" => half_disk(res)?,
        other => return Err(param_error("domain", format!("unknown domain '{other}'"))),
    };
    let s = laplace(&d)?;
    let p = d.nearest(&pole);
    let g = green_function(&s, p)?;
    r.scalar("pole_value", g.values[p]);
    r.scalar("min_free", s.free().iter().map(|&v| g.values[v]).fold(f64::INFINITY, f64::min));
    let free = s.free();
    let step = (free.len() / samples.max(1)).max(1);
    let mut asym: f64 = 0.0;
    for &x in free.iter().step_by(step).take(samples) {
        let gx = green_function(&s, x)?;
        let a = gx.values[p];
        let b = g.values[x];
        asym = asym.max((a - b).abs() / a.abs().max(b.abs()).max(1e-300));
    }
    r.scalar("asymmetry", asym);
    r.check("symmetric", asym <= sym_tol);
    r.check("positive", free.iter().all(|&v| g.values[v] > 0.0));
    if domain == "disk" {
        let pc = &d.coords[p];
        let err = free
            .iter()
            .filter(|&&v| (d.coords[v][0] - pc[0]).hypot(d.coords[v][1] - pc[1]) >= away)
            .map(|&v| (g.values[v] - disk_green(&d.coords[v], pc)).abs())
            .fold(0.0, f64::max);
        r.scalar("oracle_error", err);
        r.check("oracle", err <= oracle_tol);
    }
    Ok(())
}

fn martin(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let steps = ctx.f64s("approach", &[16.0, 8.0, 4.0, 2.0, 1.0])?;
    let radius = ctx.f64("compact_radius", 0.5)?;
    let tol = ctx.tol("poisson", 1e-2);
    let indep_tol = ctx.tol("independence", 2e-2);
    let res = ctx.resolution(256)?;
    ctx.finish()?;
    let steps: Vec<usize> = steps.iter().map(|&k| k as usize).collect();
    if steps.is_empty() || steps.iter().any(|&k| k == 0) {
        return Err(param_error("approach", "expected positive ring offsets"));
    }
    let d = disk(res)?;
    let s = laplace(&d)?;
    let pl = d.polar()?;
    let nr = pl.rings() - 1;
    if steps.iter().any(|&k| k + 1 >= nr) {
        return Err(param_error("approach", "offset exceeds the number of rings"));
    }
    let p0 = d.nearest(&[0.0, 0.0]);
    let compact: Vec<usize> = s.free().iter().copied().filter(|&v| d.radius(v) <= radius).collect();
    let radial: Vec<usize> = steps.iter().map(|&k| pl.node(nr - k, 0)).collect();
    let diagonal: Vec<usize> = steps.iter().map(|&k| pl.node(nr - k - 1, k - 1)).collect();
    let a = martin_sequence(&s, p0, &radial, &compact)?;
    let b = martin_sequence(&s, p0, &diagonal, &compact)?;
    let y = [1.0, 0.0];
    let poisson = |x: &[f64]| (1.0 - x[0] * x[0] - x[1] * x[1]) / ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2));
    let err = compact.iter().map(|&v| (a.limit().values[v] - poisson(&d.coords[v])).abs()).fold(0.0, f64::max);
    let indep = compact.iter().map(|&v| (a.limit().values[v] - b.limit().values[v]).abs()).fold(0.0, f64::max);
    r.series("cauchy_radial", a.cauchy.iter().enumerate().map(|(i, c)| [i as f64, *c]).collect());
    r.scalar("poisson_error", err);
    r.scalar("sequence_difference", indep);
    r.check("poisson", err <= tol);
    r.check("independence", indep <= indep_tol);
    Ok(())
}

fn arc_data(d: &GridDomain, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    (0..d.len()).map(|v| if d.classes[v] == NodeClass::Dirichlet { f(&d.coords[v]) } else { 0.0 }).collect()
}

fn free_within(d: &GridDomain, radius: f64) -> Vec<usize> {
    (0..d.len()).filter(|&v| d.classes[v] == NodeClass::Free && d.radius(v) < radius).collect()
}

fn bhp_pair(res: usize) -> Result<(GridDomain, GridFunction, GridFunction, GridFunction), CliError> {
    let d = half_disk(res)?;
    let s = laplace(&d)?;
    let u = solve_dirichlet(&s, &arc_data(&d, |_| 1.0), None)?;
    let v = solve_dirichlet(&s, &arc_data(&d, |c| c[1]), None)?;
    let w = solve_dirichlet(&s, &vec![1.0; d.len()], None)?;
    Ok((d, u, v, w))
}

fn bhp(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let radius = ctx.f64("inner_radius", 0.5)?;
    let tol = ctx.tol("stability", 0.1);
    let growth = ctx.tol("control_growth", 2.0);
    let res = ctx.resolutions(&[64, 128, 256])?;
    ctx.finish()?;
    let mut ratios = Vec::new();
    let mut controls = Vec::new();
    for &n in &res {
        let (d, u, v, w) = bhp_pair(n)?;
        let inner = free_within(&d, radius);
        let a = bhp_ratio(&u, &v, &inner)?;
        let c = bhp_ratio(&u, &w, &inner)?;
        r.scalar(format!("ratio_{n}"), a);
        r.scalar(format!("control_{n}"), c);
        ratios.push(a);
        controls.push(c);
    }
    r.scalar("ratio_spread", rel_spread(&ratios));
    r.check("refinement_stable", rel_spread(&ratios) <= tol);
    let grows = controls.windows(2).all(|w| w[1] > w[0]);
    let factor = controls.last().expect("non-empty") / controls[0];
    r.scalar("control_growth", factor);
    r.check("control_unbounded", grows && (res.len() < 2 || factor >= growth));
    Ok(())
}

fn oscillation(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let levels = ctx.usize("levels", 5)?;
    let radius = ctx.f64("outer_radius", 0.5)?;
    let factor = ctx.f64("factor", 0.5)?;
    let slack = ctx.tol("slack", 0.1);
    let res = ctx.resolution(128)?;
    ctx.finish()?;
    let (d, u, v, _) = bhp_pair(res)?;
    let chain: Vec<Vec<usize>> = (0..levels).map(|i| free_within(&d, radius * factor.powi(i as i32))).collect();
    let rep = oscillation_decay(&u, &v, &chain)?;
    r.series("osc", rep.osc.iter().enumerate().map(|(i, o)| [i as f64, *o]).collect());
    r.scalar("c_star", rep.c_star);
    r.scalar("predicted_rate", rep.predicted_rate);
    r.scalar("fitted_rate", rep.fitted_rate);
    r.scalar("max_step_excess", rep.max_step_excess);
    r.check("non_increasing", rep.non_increasing);
    r.check("geometric_decay", rep.fitted_rate < 1.0 && rep.fitted_rate <= rep.predicted_rate + slack);
    r.check("step_bound", rep.max_step_excess <= slack);
    Ok(())
}

fn dirichlet(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let domain = ctx.str("domain", "disk")?;
    let order_tol = ctx.tol("order", 1.8);
    let res = ctx.resolutions(&[16, 32, 64])?;
    ctx.finish()?;
    // Re z³ is harmonic.
    let exact = |c: &[f64]| c[0].powi(3) - 3.0 * c[0] * c[1] * c[1];
    let mut errors = Vec::new();
    let mut max_ok = true;
    for &n in &res {
        let d = match domain.as_str() {
            "disk" => disk(n)?,
            "half-disk" => half_disk(n)?,
            other => return Err(param_error("domain", format!("unknown domain '{other}'"))),
        };
        let s = laplace(&d)?;
        let data: Vec<f64> = d.coords.iter().map(|c| exact(c)).collect();
        let u = solve_dirichlet(&s, &data, None)?;
        let bdry: Vec<f64> = (0..d.len()).filter(|&v| s.position(v).is_none()).map(|v| data[v]).collect();
        let (lo, hi) = bdry.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
        max_ok &= s.free().iter().all(|&v| u.values[v] >= lo - 1e-12 && u.values[v] <= hi + 1e-12);
        let err = s.free().iter().map(|&v| (u.values[v] - exact(&d.coords[v])).abs()).fold(0.0, f64::max);
        r.scalar(format!("error_{n}"), err);
        errors.push(err);
    }
    r.check("maximum_principle", max_ok);
    let orders: Vec<f64> = errors.windows(2).zip(res.windows(2)).map(|(e, n)| (e[0] / e[1]).ln() / (n[1] as f64 / n[0] as f64).ln()).collect();
    for (i, o) in orders.iter().enumerate() {
        r.scalar(format!("order_{i}"), *o);
    }
    r.check("second_order", orders.iter().all(|o| *o >= order_tol));
    Ok(())
}

fn fatou(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let steps = ctx.f64s("approach", &[32.0, 16.0, 8.0, 4.0, 2.0, 1.0])?;
    let tol = ctx.tol("ratio", 0.03);
    let res = ctx.resolution(256)?;
    ctx.finish()?;
    let steps: Vec<usize> = steps.iter().map(|&k| k as usize).collect();
    let d = disk(res)?;
    let s = laplace(&d)?;
    let pl = d.polar()?;
    let nr = pl.rings() - 1;
    let na = pl.angles.len();
    if steps.is_empty() || steps.iter().any(|&k| k == 0 || k >= nr || 2 * k >= na / 2) {
        return Err(param_error("approach", "offsets must be positive and smaller than the grid"));
    }
    let p0 = d.nearest(&[0.0, 0.0]);
    let rim: Vec<usize> = (0..na).map(|j| pl.node(nr, j)).collect();
    let n = na as f64;
    let nu = DiscreteMeasure::new(rim.clone(), vec![1.0 / n; na])?;
    let mu = DiscreteMeasure::new(rim.clone(), pl.angles.iter().map(|t| (1.0 + t.cos()) / n).collect())?;
    let z = pl.node(nr, 0);
    let path: Vec<usize> = steps.iter().map(|&k| pl.node(nr - k, 0)).collect();
    let tangential: Vec<usize> = steps.iter().map(|&k| pl.node(nr - k, 2 * k)).collect();
    let rep = fatou_experiment(&s, p0, &mu, &nu, z, &path, &tangential)?;
    r.series("ratio_nontangential", rep.nontangential.points.iter().map(|p| [p.0, p.1]).collect());
    r.series("ratio_tangential", rep.tangential.points.iter().map(|p| [p.0, p.1]).collect());
    r.scalar("expected", rep.expected);
    r.scalar("nontangential_limit", rep.nontangential.points.last().map_or(f64::NAN, |p| p.1));
    r.scalar("relative_error", rep.relative_error);
    r.check("density_ratio", rep.relative_error <= tol);

    // Singular part at z: the ratio blows up.
    let mut atom_w = nu.weights.clone();
    atom_w[0] += 1.0;
    let atom = DiscreteMeasure::new(rim.clone(), atom_w)?;
    let spike = fatou_experiment(&s, p0, &atom, &nu, z, &path, &path)?;
    let tr: Vec<f64> = spike.nontangential.points.iter().map(|p| p.1).collect();
    r.scalar("point_mass_last", *tr.last().expect("non-empty"));
    r.check("point_mass_blows_up", tr.windows(2).all(|w| w[1] > w[0]));

    // Zero density on the far half: the ratio tends to 0 at the antipode.
    let far = pl.node(nr, na / 2);
    let half = DiscreteMeasure::new(rim, pl.angles.iter().map(|t| if t.cos() > 0.0 { 1.0 / n } else { 0.0 }).collect())?;
    let far_path: Vec<usize> = steps.iter().map(|&k| pl.node(nr - k, na / 2)).collect();
    let zero = fatou_experiment(&s, p0, &half, &nu, far, &far_path, &far_path)?;
    let tr: Vec<f64> = zero.nontangential.points.iter().map(|p| p.1).collect();
    r.scalar("zero_density_last", *tr.last().expect("non-empty"));
    r.check("zero_density_vanishes", tr.windows(2).all(|w| w[1] < w[0]) && zero.relative_error <= 0.05);
    Ok(())
}

fn minimal_growth(ctx: &mut Ctx, r: &mut Report) -> Result<(), CliError> {
    let pole = ctx.point("pole", [0.0, 0.6])?;
    let radius = ctx.f64("region_radius", 0.3)?;
    let tol = ctx.tol("stability", 0.25);
    let res = ctx.resolutions(&[32, 64, 128])?;
    ctx.finish()?;
    if radius >= pole[0].hypot(pole[1]) {
        return Err(param_error("region_radius", "region must not contain the pole"));
    }
    let mut cs = Vec::new();
    for &n in &res {
        let d = half_disk(n)?;
        let s = laplace(&d)?;
        let p0 = d.nearest(&pole);
        let g = green_function(&s, p0)?;
        let v = solve_dirichlet(&s, &arc_data(&d, |c| c[1]), None)?;
        let rep = minimal_growth_check(&g, &v, &free_within(&d, radius), p0)?;
        r.scalar(format!("c_measured_{n}"), rep.c_measured);
        cs.push(rep.c_measured);
    }
    r.check("finite", cs.iter().all(|c| c.is_finite() && *c > 0.0));
    r.scalar("spread", rel_spread(&cs));
    r.check("refinement_stable", rel_spread(&cs) <= tol);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unused_parameters_are_rejected() {
        let e = Experiment::new("cone-exponents").param("pp", 3);
        let err = run_experiment(&e, 0).unwrap_err();
        assert!(err.to_string().contains("pp"), "{err}");
        let e = Experiment::new("cone-exponents").tolerance("fitt", 0.1);
        assert!(run_experiment(&e, 0).is_err());
        let e = Experiment::new("thm12-scan").with_resolutions(&[8]);
        assert!(run_experiment(&e, 0).is_err());
        let e = Experiment::new("cone-exponents").param("potential", "jacobi").param("m", 9);
        assert!(run_experiment(&e, 0).is_err());
    }

    #[test]
    fn bad_parameter_types() {
        let e = Experiment::new("cone-exponents").param("p", "three");
        assert_eq!(run_experiment(&e, 0).unwrap_err().exit_code(), 2);
        let e = Experiment::new("cone-exponents").param("potential", "nope");
        assert_eq!(run_experiment(&e, 0).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn simons_exponents() {
        let r = run_experiment(&Experiment::new("cone-exponents"), 0).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.get("alpha_plus"), -2.0);
        assert_eq!(r.get("alpha_minus"), -3.0);
    }

    #[test]
    fn thm12_fails_at_large_lambda() {
        let r = run_experiment(&Experiment::new("thm12-scan").param("lambda", 0.1), 0).unwrap();
        assert!(!r.pass);
        assert!(!r.passed("mu-lower"));
        assert!(r.passed("largest_lambda_bracket"));
    }

    #[test]
    fn attractor_directions() {
        let r = run_experiment(&Experiment::new("scaling-attractor"), 0).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn complex_exponents_are_solver_errors() {
        let e = Experiment::new("cone-exponents").param("p", 1).param("q", 1);
        assert_eq!(run_experiment(&e, 0).unwrap_err().exit_code(), 3);
    }
}
