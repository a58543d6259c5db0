use std::collections::BTreeMap;
use std::path::PathBuf;

use periodist_core::corona;
use periodist_core::exp_type;
use periodist_core::fourier::{self, CoefficientMap, Coefficients, PeriodBasis};
use periodist_core::lattice::{self, LatticeIndex};
use periodist_core::seq::{pairing, seminorm};
use periodist_core::stable_rank::{self, ReduceOptions, ReductionTrace, TraceAudit};
use periodist_core::{Complex64, FastSequence, SlowSequence};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::spec::{Command, JobSpec};
use crate::{Outcome, Table};

/// Pass/fail tolerance for reconstructed identities such as the
/// factorisation in a reduction trace.
const IDENTITY_TOLERANCE: f64 = 1e-10;
const PERIODICITY_TOLERANCE: f64 = 1e-10;

pub(crate) struct Context<'a> {
    pub spec: &'a JobSpec,
    pub dim: usize,
    pub window: u64,
    pub epsilon: Option<f64>,
    pub base_dir: PathBuf,
}

fn missing(field: &str) -> CliError {
    CliError::Input(format!("missing parameter `params.{field}`"))
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialise")
}

fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

impl Context<'_> {
    fn seq(&self, name: &str) -> Result<SlowSequence, CliError> {
        let node = self
            .spec
            .inputs
            .get(name)
            .ok_or_else(|| CliError::Input(format!("unknown input `{name}`")))?;
        SlowSequence::new(node.clone(), self.dim).map_err(|e| match e {
            periodist_core::Error::CertificateViolation { .. } => {
                CliError::Math(format!("input `{name}`: {e}"))
            }
            e => CliError::Input(format!("input `{name}`: {e}")),
        })
    }

    fn named(&self, field: &str, name: Option<&String>) -> Result<SlowSequence, CliError> {
        self.seq(name.ok_or_else(|| missing(field))?)
    }

    fn list(&self, field: &str, names: Option<&Vec<String>>) -> Result<Vec<SlowSequence>, CliError> {
        let names = names.ok_or_else(|| missing(field))?;
        if names.is_empty() {
            return Err(CliError::Input(format!("`params.{field}` is empty")));
        }
        names.iter().map(|n| self.seq(n)).collect()
    }

    fn fast(&self, field: &str, name: Option<&String>) -> Result<FastSequence, CliError> {
        let s = self.named(field, name)?;
        FastSequence::from_slow(s).map_err(|e| {
            CliError::Input(format!("`params.{field}` must decay rapidly: {e}"))
        })
    }

    fn witness_params(&self) -> Result<(f64, u32), CliError> {
        let p = &self.spec.params;
        Ok((p.delta.ok_or_else(|| missing("delta"))?, p.k.ok_or_else(|| missing("K"))?))
    }

    fn basis(&self) -> Result<PeriodBasis, CliError> {
        let b = match &self.spec.params.basis {
            Some(rows) => PeriodBasis::new(rows.clone())?,
            None => PeriodBasis::identity(self.dim)?,
        };
        if b.dim() != self.dim {
            return Err(CliError::Input(format!(
                "basis has dimension {} but `dim` is {}",
                b.dim(),
                self.dim
            )));
        }
        Ok(b)
    }

    fn tolerance(&self) -> f64 {
        self.spec.params.tolerance.unwrap_or(corona::RESIDUAL_TOLERANCE)
    }
}

pub(crate) fn dispatch(command: Command, ctx: &Context) -> Result<Outcome, CliError> {
    match command {
        Command::CheckGrowth => check_growth(ctx),
        Command::CoronaCheck => corona_check(ctx),
        Command::BezoutSolve => bezout_solve(ctx),
        Command::BezoutVerify => bezout_verify(ctx),
        Command::Reduce => reduce(ctx),
        Command::Approx => approx(ctx),
        Command::Gap => gap(ctx),
        Command::Qdemo => qdemo(ctx),
        Command::FourierCoeffs => fourier_coeffs(ctx),
        Command::FourierSynth => fourier_synth(ctx),
        Command::Pair => pair(ctx),
        Command::ExpDemo => exp_demo(ctx),
    }
}

fn shell_table(column: &str, rows: Vec<(u64, f64)>) -> Table {
    Table {
        header: vec!["shell".into(), column.into()],
        rows: rows
            .into_iter()
            .map(|(r, v)| vec![r.to_string(), v.to_string()])
            .collect(),
    }
}

fn check_growth(ctx: &Context) -> Result<Outcome, CliError> {
    let s = ctx.named("seq", ctx.spec.params.seq.as_ref())?;
    let cert = s.cert();
    let scan = lattice::map_window(ctx.dim, ctx.window, |n| {
        let v = s.eval(n)?.norm();
        Ok((v / cert.bound_at(n.norm1()), cert.admits(v, n.norm1())))
    })?;
    let max_ratio = scan.iter().map(|(_, (r, _))| *r).fold(0.0, f64::max);
    let admitted = scan.iter().all(|(_, (_, ok))| *ok);
    let mut result = json!({
        "cert": cert,
        "max_ratio_on_window": max_ratio,
    });
    if let Ok(fast) = FastSequence::from_slow(s) {
        let order = ctx.spec.params.order.unwrap_or(0);
        result["rapid_decay"] = json!(true);
        result["seminorm"] = to_json(&seminorm(&fast, order, ctx.window)?);
    } else {
        result["rapid_decay"] = json!(false);
    }
    Ok(Outcome {
        verdict: Some(admitted),
        result,
        table: None,
    })
}

fn corona_check(ctx: &Context) -> Result<Outcome, CliError> {
    let a = ctx.list("family", ctx.spec.params.family.as_ref())?;
    let (delta, k) = ctx.witness_params()?;
    let check = corona::check_corona_window(&a, delta, k, ctx.window)?;
    let witness = if check.holds {
        corona::establish_witness(&a, delta, k, ctx.window)?
    } else {
        None
    };
    let margins = corona::corona_margin_by_shell(&a, k, ctx.window)?;
    Ok(Outcome {
        verdict: Some(check.holds),
        result: json!({
            "holds": check.holds,
            "first_violation": check.first_violation,
            "witness": witness,
        }),
        table: Some(shell_table("margin", margins)),
    })
}

fn bezout_solve(ctx: &Context) -> Result<Outcome, CliError> {
    let a = ctx.list("family", ctx.spec.params.family.as_ref())?;
    let (delta, k) = ctx.witness_params()?;
    let Some(witness) = corona::establish_witness(&a, delta, k, ctx.window)? else {
        let check = corona::check_corona_window(&a, delta, k, ctx.window)?;
        return Ok(Outcome {
            verdict: Some(false),
            result: json!({ "holds": false, "first_violation": check.first_violation }),
            table: None,
        });
    };
    let sol = corona::solve_bezout(&a, &witness)?;
    let sweep = corona::bezout_residual_by_shell(&a, &sol.cofactors, ctx.window)?;
    let residual = sweep.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    let tol = ctx.tolerance();
    Ok(Outcome {
        verdict: Some(residual <= tol),
        result: json!({
            "witness": witness,
            "cofactors": sol.cofactors.iter().map(|b| to_json(b.node())).collect::<Vec<_>>(),
            "cofactor_certificates": sol.cofactors.iter().map(|b| b.cert()).collect::<Vec<_>>(),
            "max_residual": residual,
            "tolerance": tol,
        }),
        table: Some(shell_table("residual", sweep)),
    })
}

fn bezout_verify(ctx: &Context) -> Result<Outcome, CliError> {
    let a = ctx.list("family", ctx.spec.params.family.as_ref())?;
    let b = ctx.list("cofactors", ctx.spec.params.cofactors.as_ref())?;
    let sweep = corona::bezout_residual_by_shell(&a, &b, ctx.window)?;
    let residual = sweep.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    let tol = ctx.tolerance();
    let implied = corona::witness_from_bezout(&b).ok();
    Ok(Outcome {
        verdict: Some(residual <= tol),
        result: json!({
            "max_residual": residual,
            "tolerance": tol,
            "implied_witness": implied,
        }),
        table: Some(shell_table("residual", sweep)),
    })
}

fn trace_json(t: &ReductionTrace, audit: &TraceAudit) -> Value {
    json!({
        "u1": to_json(t.u1.node()),
        "A1": to_json(t.a1_normalized.node()),
        "B1": to_json(t.b1_scaled.node()),
        "B1tilde": to_json(t.b1_clipped.node()),
        "h": to_json(t.h.node()),
        "correction": to_json(t.correction.node()),
        "result": to_json(t.result.node()),
        "epsilon": t.epsilon,
        "correction_lower_bound": t.correction_lower_bound,
        "bezout_residual": t.bezout_residual,
        "factor_witnesses": t.factor_witnesses,
        "result_inverse_witness": t.result_inverse_witness,
        "audit": audit,
    })
}

fn reduce(ctx: &Context) -> Result<Outcome, CliError> {
    let a = ctx.list("family", ctx.spec.params.family.as_ref())?;
    let b = ctx.list("cofactors", ctx.spec.params.cofactors.as_ref())?;
    let opts = ReduceOptions {
        epsilon: ctx.epsilon.unwrap_or(stable_rank::DEFAULT_EPSILON),
        window: ctx.window,
        tolerance: ctx.tolerance(),
    };
    if a.len() == 2 && b.len() == 2 {
        let t = stable_rank::reduce_pair(&a[0], &a[1], &b[0], &b[1], &opts)?;
        let audit = stable_rank::audit_trace(&t, &a[0], &a[1], ctx.window)?;
        return Ok(Outcome {
            verdict: Some(audit.passes(&t, IDENTITY_TOLERANCE)),
            result: json!({ "trace": trace_json(&t, &audit) }),
            table: None,
        });
    }
    let red = stable_rank::reduce_tuple(&a, &b, &opts)?;
    let audit = stable_rank::audit_trace(&red.trace, &a[0], &red.pair_second, ctx.window)?;
    let residual = corona::verify_bezout(&red.reduced, &red.cofactors, ctx.window)?;
    Ok(Outcome {
        verdict: Some(audit.passes(&red.trace, IDENTITY_TOLERANCE) && residual <= IDENTITY_TOLERANCE),
        result: json!({
            "h": red.h.iter().map(|s| to_json(s.node())).collect::<Vec<_>>(),
            "reduced": red.reduced.iter().map(|s| to_json(s.node())).collect::<Vec<_>>(),
            "cofactors": red.cofactors.iter().map(|s| to_json(s.node())).collect::<Vec<_>>(),
            "reduced_residual": residual,
            "trace": trace_json(&red.trace, &audit),
        }),
        table: None,
    })
}

fn approx(ctx: &Context) -> Result<Outcome, CliError> {
    let a = ctx.named("seq", ctx.spec.params.seq.as_ref())?;
    let eps = match (&ctx.spec.params.epsilons, ctx.epsilon) {
        (Some(list), _) => list.clone(),
        (None, Some(e)) => vec![e],
        (None, None) => return Err(missing("epsilons")),
    };
    let net = stable_rank::approx_by_invertibles(&a, &eps)?;
    let mut entries = Vec::new();
    let mut all_units = true;
    for (e, c) in eps.iter().zip(&net) {
        let unit = corona::is_unit(&c.sequence, &c.inverse_witness, ctx.window)?;
        let change = lattice::map_window(ctx.dim, ctx.window, |n| {
            Ok((c.sequence.eval(n)? - a.eval(n)?).norm())
        })?
        .into_iter()
        .map(|(_, v)| v)
        .fold(0.0, f64::max);
        all_units &= unit.invertible;
        entries.push(json!({
            "epsilon": e,
            "sequence": to_json(c.sequence.node()),
            "inverse_witness": c.inverse_witness,
            "invertible": unit.invertible,
            "max_change_on_window": change,
        }));
    }
    Ok(Outcome {
        verdict: Some(all_units),
        result: json!({ "net": entries }),
        table: None,
    })
}

fn gap(ctx: &Context) -> Result<Outcome, CliError> {
    let p = &ctx.spec.params;
    let x = ctx.named("x", p.x.as_ref())?;
    let y = ctx.named("y", p.y.as_ref())?;
    let b = ctx.fast("test", p.test.as_ref())?;
    let g = stable_rank::weak_star_gap(&x, &y, &b, ctx.window)?;
    Ok(Outcome {
        verdict: Some(g.gap <= g.bound),
        result: to_json(&g),
        table: None,
    })
}

fn qdemo(ctx: &Context) -> Result<Outcome, CliError> {
    let p = &ctx.spec.params;
    let rate = p.rate.ok_or_else(|| missing("rate"))?;
    let (delta, k) = ctx.witness_params()?;
    let n_max = p.n_max.unwrap_or(ctx.window);
    let hit = stable_rank::q_algebra_violation(ctx.dim, rate, delta, k, n_max)?;
    let mut verdict = hit.is_some();
    let mut result = json!({
        "rate": rate,
        "delta": delta,
        "K": k,
        "n_max": n_max,
        "violation": hit,
        "shell": hit.as_ref().map(LatticeIndex::norm1),
    });
    if p.test.is_some() {
        let b = ctx.fast("test", p.test.as_ref())?;
        let eps = ctx.epsilon.ok_or_else(|| missing("epsilon"))?;
        let g = stable_rank::exp_decay_gap(eps, &b, ctx.window)?;
        verdict &= g.gap <= g.bound;
        result["decay_gap"] = to_json(&g);
    }
    Ok(Outcome {
        verdict: Some(verdict),
        result,
        table: None,
    })
}

fn index_key(m: &LatticeIndex) -> String {
    m.coords().iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn parse_key(key: &str, dim: usize) -> Result<LatticeIndex, CliError> {
    let coords = key
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Input(format!("bad coefficient index `{key}`")))?;
    if coords.len() != dim {
        return Err(CliError::Input(format!(
            "coefficient index `{key}` does not have {dim} coordinates"
        )));
    }
    LatticeIndex::new(coords).map_err(|e| CliError::Input(e.to_string()))
}

fn read_samples(path: &std::path::Path) -> Result<Vec<Complex64>, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if bytes.len() % 16 != 0 {
        return Err(CliError::Input(format!(
            "{}: length {} is not a whole number of complex doubles",
            path.display(),
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect())
}

fn sparse_json(c: &CoefficientMap) -> Value {
    match c.coefficients() {
        Coefficients::Sparse(map) => {
            let obj: BTreeMap<String, Value> =
                map.iter().map(|(m, v)| (index_key(m), complex(*v))).collect();
            to_json(&obj)
        }
        Coefficients::Sequence(s) => to_json(s.node()),
    }
}

fn fourier_coeffs(ctx: &Context) -> Result<Outcome, CliError> {
    let p = &ctx.spec.params;
    let basis = ctx.basis()?;
    let n = p.n.ok_or_else(|| missing("N"))?;
    let samples = match (&p.samples, &p.samples_file) {
        (Some(s), None) => s.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
        (None, Some(f)) => read_samples(&ctx.base_dir.join(f))?,
        (Some(_), Some(_)) => {
            return Err(CliError::Input(
                "give either `params.samples` or `params.samples_file`, not both".into(),
            ))
        }
        (None, None) => return Err(missing("samples")),
    };
    let out = fourier::coeffs_from_samples(&basis, n, &samples)?;
    Ok(Outcome {
        verdict: None,
        result: json!({
            "coefficients": sparse_json(&out.coefficients),
            "growth": out.coefficients.growth(),
            "metadata": out.metadata,
            "basis": basis.rows(),
        }),
        table: None,
    })
}

fn coefficient_map(ctx: &Context) -> Result<CoefficientMap, CliError> {
    let raw = ctx
        .spec
        .params
        .coefficients
        .as_ref()
        .ok_or_else(|| missing("coefficients"))?;
    let map = raw
        .iter()
        .map(|(k, [re, im])| Ok((parse_key(k, ctx.dim)?, Complex64::new(*re, *im))))
        .collect::<Result<BTreeMap<_, _>, CliError>>()?;
    Ok(CoefficientMap::sparse(ctx.dim, map)?)
}

fn fourier_synth(ctx: &Context) -> Result<Outcome, CliError> {
    let basis = ctx.basis()?;
    let c = coefficient_map(ctx)?;
    let points = ctx.spec.params.points.as_ref().ok_or_else(|| missing("points"))?;
    let mut values = Vec::new();
    let mut drift = 0.0f64;
    for x in points {
        let f = fourier::synthesize(&basis, &c, x)?;
        for k in 0..basis.dim() {
            let shifted: Vec<f64> = x.iter().zip(basis.period(k)).map(|(a, b)| a + b).collect();
            drift = drift.max((fourier::synthesize(&basis, &c, &shifted)? - f).norm());
        }
        values.push(complex(f));
    }
    Ok(Outcome {
        verdict: Some(drift <= PERIODICITY_TOLERANCE),
        result: json!({ "values": values, "max_period_drift": drift }),
        table: None,
    })
}

fn pair(ctx: &Context) -> Result<Outcome, CliError> {
    let p = &ctx.spec.params;
    let b = ctx.fast("test", p.test.as_ref())?;
    let result = match (&p.seq, &p.coefficients) {
        (Some(name), None) => pairing(&ctx.seq(name)?, &b, ctx.window)?,
        (None, Some(_)) => fourier::distribution_action(&coefficient_map(ctx)?, &b, ctx.window)?,
        (Some(_), Some(_)) => {
            return Err(CliError::Input(
                "give either `params.seq` or `params.coefficients`, not both".into(),
            ))
        }
        (None, None) => return Err(missing("seq")),
    };
    let order = p.order.unwrap_or(0);
    Ok(Outcome {
        verdict: None,
        result: json!({
            "value": complex(result.value),
            "truncation_radius": result.truncation_radius,
            "tail_bound": result.tail_bound,
            "test_seminorm": seminorm(&b, order, ctx.window)?,
        }),
        table: None,
    })
}

fn exp_demo(ctx: &Context) -> Result<Outcome, CliError> {
    let max_degree = ctx.spec.params.max_degree.unwrap_or(3);
    let identity = exp_type::unimodular_pair_residual();
    let search = exp_type::polynomial_reducer_search(max_degree)?;
    let verdict = identity == 0.0 && search.units_found == 0 && search.max_root_residual <= 1e-9;
    Ok(Outcome {
        verdict: Some(verdict),
        result: json!({
            "identity": {
                "f": "z - 1",
                "g": "z^3",
                "p": "-(1 + z + z^2)",
                "q": "1",
                "max_residual": identity,
            },
            "reducer_search": search,
        }),
        table: None,
    })
}
