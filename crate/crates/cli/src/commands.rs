use std::fmt::Write as _;
use std::path::Path;

use cartan_core::geometry::ConvexBody;
use cartan_core::intrinsic_volumes::{intrinsic_volumes_closed, intrinsic_volumes_ellipsoid, steiner_fit, Valuation};
use cartan_core::kinematic::{
    kinematic_report, separation_lemma_check, separation_lemma_check_random, KinematicGroup, ReportInputs,
};
use cartan_core::sampling::{sigma_distance, EstimatorResult, McPlan};
use cartan_core::weyl::{Method, WeylConstants, WEYL_MAX_DIM};
use cartan_core::MAX_DIM;
use serde_json::{json, Value};

use crate::config::{required, EpsGrid};
use crate::{CjArgs, CjMethod, CliError, Command, GroupArg, IntrinsicArgs, IntrinsicMethod, KinematicArgs, LemmaArgs, PhiArg, Report};

const DEFAULT_SAMPLES: u64 = 1_000_000;
const DEFAULT_TRIALS: u64 = 1000;

pub fn run(command: &Command, shards: u32) -> Result<Report, CliError> {
    match command {
        Command::Intrinsic(a) => intrinsic(a, shards),
        Command::Cj(a) => cj(a, shards),
        Command::Kinematic(a) => kinematic(a, shards),
        Command::LemmaCheck(a) => lemma_check(a, shards),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize to JSON")
}

fn plan_entry(name: &str, plan: &McPlan) -> Value {
    json!({"name": name, "samples": plan.samples, "seed": plan.seed})
}

fn shard_plan(shards: u32, plans: &[(&str, &McPlan)]) -> Value {
    json!({
        "shards": shards,
        "estimates": plans.iter().map(|(n, p)| plan_entry(n, p)).collect::<Vec<_>>(),
    })
}

/// Like `intrinsic_volumes_closed`, but an ellipsoid whose quadrature
/// fails is reported instead of treated as having no closed form.
fn closed_forms(body: &ConvexBody) -> Result<Option<Vec<f64>>, CliError> {
    match body {
        ConvexBody::Ellipsoid(e) => Ok(Some(intrinsic_volumes_ellipsoid(e.semiaxes().as_slice())?)),
        _ => Ok(intrinsic_volumes_closed(body)),
    }
}

fn intrinsic(a: &IntrinsicArgs, shards: u32) -> Result<Report, CliError> {
    let (body, spec) = required(a.body.clone(), "body")?.load("body")?;
    let method = a.method.unwrap_or(IntrinsicMethod::Auto);
    let closed = match method {
        IntrinsicMethod::Steiner => None,
        IntrinsicMethod::Auto => closed_forms(&body)?,
        IntrinsicMethod::Closed => Some(closed_forms(&body)?.ok_or_else(|| {
            CliError::Validation(format!("no closed form for a {}; use --method steiner", body.kind()))
        })?),
    };
    let mut csv = String::from("j,value,std_error,provenance\n");
    if let Some(v) = closed {
        let values: Vec<Value> = v
            .iter()
            .enumerate()
            .map(|(j, x)| json!({"j": j, "value": x, "std_error": null, "provenance": "closed_form"}))
            .collect();
        for (j, x) in v.iter().enumerate() {
            let _ = writeln!(csv, "{j},{x},,closed_form");
        }
        return Ok(Report {
            config: json!({"body": to_value(&spec), "method": "closed"}),
            shard_plan: shard_plan(shards, &[]),
            result: json!({"method": "closed", "values": values}),
            csv: Some(csv),
        });
    }

    let seed = required(a.seed, "seed")?;
    let samples = a.samples.map_or(DEFAULT_SAMPLES, |s| s.0);
    let eps = a.eps.clone().unwrap_or_else(|| "0.1:1.0:10".parse::<EpsGrid>().expect("valid default")).0;
    let plan = McPlan::new(samples, seed).with_shards(shards);
    let fit = steiner_fit(&body, &eps, &plan)?;
    let values: Vec<Value> = (0..fit.intrinsic_volumes.len())
        .map(|j| {
            json!({
                "j": j,
                "value": fit.intrinsic_volumes[j],
                "std_error": fit.std_errors[j],
                "provenance": "steiner_fit",
            })
        })
        .collect();
    for j in 0..fit.intrinsic_volumes.len() {
        let _ = writeln!(csv, "{j},{},{},steiner_fit", fit.intrinsic_volumes[j], fit.std_errors[j]);
    }
    Ok(Report {
        config: json!({"body": to_value(&spec), "method": "steiner", "eps": eps, "samples": samples, "seed": seed}),
        shard_plan: shard_plan(shards, &[("steiner", &plan)]),
        result: json!({
            "method": "steiner",
            "values": values,
            "fit": {
                "epsilons": fit.epsilons,
                "volumes": to_value(&fit.volumes),
                "coefficients": fit.coefficients,
                "residual": fit.residual,
            },
        }),
        csv: Some(csv),
    })
}

struct Constants {
    c: WeylConstants,
    cached: bool,
}

fn constants(n: usize, method: Method, plan: &McPlan, cache: Option<&Path>) -> Result<Constants, CliError> {
    if let Some(dir) = cache {
        if let Some(c) = WeylConstants::load_cache(dir, n, method, plan)? {
            return Ok(Constants { c, cached: true });
        }
    }
    let c = WeylConstants::compute(n, method, plan)?;
    if let Some(dir) = cache {
        c.write_cache(dir)?;
    }
    Ok(Constants { c, cached: false })
}

fn route_value(k: &Constants, j: Option<usize>, samples: u64) -> Value {
    let n = k.c.n;
    let exact = (n as f64 / 2.0).exp();
    let entries: Vec<Value> = k
        .c
        .c
        .iter()
        .enumerate()
        .filter(|(i, _)| j.is_none_or(|j| j == *i))
        .map(|(i, r)| json!({"j": i, "mean": r.mean, "std_error": r.std_error}))
        .collect();
    let c_n = k.c.c[n];
    let mut v = json!({
        "c": entries,
        "cached": k.cached,
        "c_n_sigma_from_exact": c_n.sigma_distance(exact),
    });
    if let Some(ess) = k.c.ess {
        v["ess"] = json!(ess);
        v["ess_fraction"] = json!(ess / samples as f64);
    }
    v
}

fn cj(a: &CjArgs, shards: u32) -> Result<Report, CliError> {
    let n = required(a.n, "n")?;
    let method = a.method.unwrap_or(CjMethod::Direct);
    let limit = if method == CjMethod::Direct { MAX_DIM } else { WEYL_MAX_DIM };
    if n == 0 || n > limit {
        return Err(CliError::Validation(format!(
            "n = {n} is unsupported for --method {}; use 1 ≤ n ≤ {limit}",
            serde_json::to_value(method).expect("enum").as_str().unwrap_or_default()
        )));
    }
    if let Some(j) = a.j.filter(|j| *j > n) {
        return Err(CliError::Validation(format!("j = {j} exceeds n = {n}")));
    }
    let seed = required(a.seed, "seed")?;
    let samples = a.samples.map_or(DEFAULT_SAMPLES, |s| s.0);
    let direct_plan = McPlan::new(samples, seed).with_shards(shards);
    // The routes run on unrelated streams so their errors are independent.
    let weyl_plan = direct_plan.reseeded(1);
    let cache = a.cache.as_deref();
    let run_direct = matches!(method, CjMethod::Direct | CjMethod::Both);
    let run_weyl = matches!(method, CjMethod::Weyl | CjMethod::Both);
    let (direct, weyl) = rayon::join(
        || run_direct.then(|| constants(n, Method::Direct, &direct_plan, cache)).transpose(),
        || run_weyl.then(|| constants(n, Method::Weyl, &weyl_plan, cache)).transpose(),
    );
    let (direct, weyl) = (direct?, weyl?);

    let mut routes = serde_json::Map::new();
    let mut plans = Vec::new();
    let mut csv = String::from("j,method,mean,std_error\n");
    for (name, k, plan) in [("direct", &direct, &direct_plan), ("weyl", &weyl, &weyl_plan)] {
        if let Some(k) = k {
            routes.insert(name.into(), route_value(k, a.j, samples));
            plans.push((name, plan));
            for (i, r) in k.c.c.iter().enumerate().filter(|(i, _)| a.j.is_none_or(|j| j == *i)) {
                let _ = writeln!(csv, "{i},{name},{},{}", r.mean, r.std_error);
            }
        }
    }
    let cross_check: Option<Vec<Value>> = match (&direct, &weyl) {
        (Some(d), Some(w)) => Some(
            d.c.c
                .iter()
                .zip(&w.c.c)
                .enumerate()
                .filter(|(i, _)| a.j.is_none_or(|j| j == *i))
                .map(|(i, (x, y))| {
                    json!({
                        "j": i,
                        "direct": x.mean,
                        "weyl": y.mean,
                        "sigma": sigma_distance(x.mean, x.std_error, y.mean, y.std_error),
                    })
                })
                .collect(),
        ),
        _ => None,
    };
    let mut result = json!({
        "n": n,
        "z_n": cartan_core::weyl::z_n(n),
        "c_n_exact": (n as f64 / 2.0).exp(),
        "routes": routes,
    });
    if let Some(x) = cross_check {
        result["cross_check"] = json!(x);
    }
    Ok(Report {
        config: json!({"n": n, "j": a.j, "method": to_value(&method), "samples": samples, "seed": seed}),
        shard_plan: shard_plan(shards, &plans),
        result,
        csv: Some(csv),
    })
}

fn group_of(g: GroupArg) -> KinematicGroup {
    match g {
        GroupArg::Gl => KinematicGroup::Gl,
        GroupArg::O => KinematicGroup::O,
        GroupArg::So => KinematicGroup::So,
    }
}

fn kinematic(a: &KinematicArgs, shards: u32) -> Result<Report, CliError> {
    let group_arg = a.group.unwrap_or(GroupArg::Gl);
    let phi_arg = a.phi.unwrap_or(PhiArg::Chi);
    let (m, m_spec) = required(a.m.clone(), "M")?.load("M")?;
    let (l, l_spec) = required(a.l.clone(), "L")?.load("L")?;
    if m.dim() != l.dim() {
        return Err(CliError::Validation(format!("M is {}-dimensional but L is {}-dimensional", m.dim(), l.dim())));
    }
    let n = m.dim();
    let v_l = intrinsic_volumes_closed(&l)
        .ok_or_else(|| CliError::Validation(format!("L needs closed-form intrinsic volumes; a {} has none", l.kind())))?;
    let seed = required(a.seed, "seed")?;
    let samples = a.samples.map_or(DEFAULT_SAMPLES, |s| s.0);
    let crofton_samples = a.crofton_samples.map_or(samples, |s| s.0);
    let c_samples = a.c_samples.map_or(samples, |s| s.0);
    let inner = a.inner_samples.unwrap_or(cartan_core::intrinsic_volumes::DEFAULT_INNER_SAMPLES);
    if inner == 0 {
        return Err(CliError::Validation("--inner-samples must be positive".into()));
    }
    let phi = match phi_arg {
        PhiArg::Chi => Valuation::euler(),
        PhiArg::Vn => Valuation::volume_with_inner(n, inner),
    };
    let group = group_of(group_arg);
    let base = McPlan::new(samples, seed).with_shards(shards);
    let lhs_plan = base;
    let crofton_plan = McPlan::new(crofton_samples, seed).with_shards(shards).reseeded(1);
    let c_plan = McPlan::new(c_samples, seed).with_shards(shards).reseeded(2);

    let mut plans = vec![("lhs", &lhs_plan), ("crofton", &crofton_plan)];
    let mut c_cached = None;
    let c = if group.is_affine() {
        let k = constants(n, Method::Direct, &c_plan, a.cache.as_deref())?;
        c_cached = Some(k.cached);
        plans.push(("c", &c_plan));
        Some(k.c.c)
    } else {
        None
    };
    let report = kinematic_report(
        &ReportInputs {
            group,
            phi: &phi,
            lhs_plan,
            crofton_plan,
            c,
        },
        &m,
        &l,
    )?;

    let mut result = json!({"report": to_value(&report)});
    if let Some(cached) = c_cached {
        result["c_cached"] = json!(cached);
    }
    if phi_arg == PhiArg::Vn {
        let vm = intrinsic_volumes_closed(&m).map(|v| v[n]).or_else(|| m.exact_volume());
        if let Some(vm) = vm {
            let factor = if group.is_affine() { (n as f64 / 2.0).exp() } else { 1.0 };
            result["fubini"] = fubini(&report.lhs, factor * vm * v_l[n]);
        }
    }
    let mut config = json!({
        "group": to_value(&group_arg),
        "phi": to_value(&phi_arg),
        "M": to_value(&m_spec),
        "L": to_value(&l_spec),
        "samples": samples,
        "crofton_samples": crofton_samples,
        "seed": seed,
    });
    if group.is_affine() {
        config["c_samples"] = json!(c_samples);
    }
    if phi_arg == PhiArg::Vn {
        config["inner_samples"] = json!(inner);
    }
    Ok(Report {
        config,
        shard_plan: shard_plan(shards, &plans),
        result,
        csv: Some(report.to_csv()),
    })
}

fn fubini(lhs: &EstimatorResult, oracle: f64) -> Value {
    json!({
        "oracle": oracle,
        "sigma": lhs.sigma_distance(oracle),
        "ratio": lhs.mean / oracle,
    })
}

fn polygon(arg: &crate::config::BodyArg, what: &str) -> Result<(ConvexBody, Value), CliError> {
    let (body, spec) = arg.load(what)?;
    if body.dim() != 2 || body.vertices().is_none() {
        return Err(CliError::Validation(format!("{what} must be a polygon")));
    }
    Ok((body, to_value(&spec)))
}

fn lemma_check(a: &LemmaArgs, shards: u32) -> Result<Report, CliError> {
    let trials = a.trials.map_or(DEFAULT_TRIALS, |t| t.0);
    let seed = required(a.seed, "seed")?;
    let plan = McPlan::new(trials, seed).with_shards(shards);
    let mut config = json!({"trials": trials, "seed": seed});
    let report = match (&a.m, &a.l) {
        (Some(m), Some(l)) => {
            let (m, ms) = polygon(m, "M")?;
            let (l, ls) = polygon(l, "L")?;
            config["M"] = ms;
            config["L"] = ls;
            separation_lemma_check(&m, &l, &plan)?
        }
        (None, None) => separation_lemma_check_random(&plan)?,
        _ => return Err(CliError::Validation("give both --M and --L, or neither".into())),
    };
    let mut result = to_value(&report);
    result["pass"] = json!(report.disagreements == 0);
    Ok(Report {
        config,
        shard_plan: shard_plan(shards, &[("trials", &plan)]),
        result,
        csv: None,
    })
}
