use std::f64::consts::FRAC_PI_2;
use std::io;

use num_complex::Complex64;
use scq_core::elliptic::{self, normalized_half_periods, wp, HalfPeriods};
use scq_core::fuchsian::{cover_data, geodesic_from_cover, table, winding_number, CoverData, TABLE_A};
use scq_core::geometry::{scq_from_params, scq_vertical_edge};
use scq_core::schwarzian::{lambda_from_mu, AccessoryParams, RectParams};
use scq_core::solver::{
    arccot4, boundary_polyline, map_values, nehari_bounds, rect_map_values, solve_geometry, solve_lambda,
    sturm_bounds, univalence_sweep, Target, UnivalenceInterval,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{document, num, opt, usage, Failure, Output, Tolerances};
use crate::{Format, FuchsianArgs, GeometryArgs, MapArgs, ParamsArgs, UnivalenceArgs, WpZeroArgs};

type Run = (Tolerances, Result<Output, Failure>);

fn value<S: Serialize>(s: &S) -> Result<Value, Failure> {
    serde_json::to_value(s).map_err(|e| Failure::Io(io::Error::from(e)))
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn json_only(format: Option<Format>, what: &str) -> Result<(), Failure> {
    match format {
        Some(Format::Csv) => Err(usage(format!("{what} output is JSON only"))),
        _ => Ok(()),
    }
}

fn points_csv(pts: &[Option<Complex64>]) -> Output {
    let rows = pts
        .iter()
        .map(|p| match p {
            Some(z) => vec![num(z.re), num(z.im)],
            None => vec![String::new(), String::new()],
        })
        .collect();
    Output::Csv { header: vec!["x", "y"], rows }
}

pub fn map(a: &MapArgs, format: Option<Format>) -> Run {
    let tol = Tolerances { boundary_eps: Some(a.tol), ..Default::default() };
    let out = run_map(a, format, &tol);
    (tol, out)
}

fn run_map(a: &MapArgs, format: Option<Format>, tol: &Tolerances) -> Result<Output, Failure> {
    let (data, problem) = match (a.tau, a.t) {
        (Some(_), Some(_)) => return Err(usage("--tau and --t are mutually exclusive")),
        (Some(tau), None) => {
            let mu = a.mu.ok_or_else(|| usage("--tau needs --mu"))?;
            if a.lambda.is_some() {
                return Err(usage("the rectangle problem takes --mu, not --lambda"));
            }
            let hp = normalized_half_periods(tau)?;
            (rect_map_values(&RectParams::new(a.alpha, hp, mu)?)?, "rectangle")
        }
        (None, Some(t)) => {
            let lambda = match (a.lambda, a.mu) {
                (Some(l), None) => l,
                (None, Some(mu)) => lambda_from_mu(a.alpha, t, mu),
                _ => return Err(usage("give exactly one of --lambda and --mu")),
            };
            (map_values(&AccessoryParams::new(a.alpha, t, lambda)?)?, "disk")
        }
        (None, None) => return Err(usage("--t (disk) or --tau with --mu (rectangle) is required")),
    };
    let p = AccessoryParams::new(data.alpha, data.t, data.lambda)?;
    let boundary = boundary_polyline(&p, a.steps as usize, a.tol);
    Ok(match format.unwrap_or(Format::Json) {
        Format::Csv => points_csv(&boundary),
        Format::Json => {
            let body = merge(value(&data)?, json!({ "problem": problem, "boundary": boundary }));
            Output::Json(document(tol, body))
        }
    })
}

pub fn params(a: &ParamsArgs, format: Option<Format>) -> Run {
    let tol = Tolerances::default();
    let out = run_params(a, format, &tol);
    (tol, out)
}

fn run_params(a: &ParamsArgs, format: Option<Format>, tol: &Tolerances) -> Result<Output, Failure> {
    let alpha = a.alpha;
    let (t, lambda) = match (a.t, a.kappa1, a.p2) {
        (Some(t), Some(k), None) => (t, solve_lambda(alpha, t, Target::Kappa1(k), a.lambda)?),
        (Some(t), None, Some(p)) => (t, solve_lambda(alpha, t, Target::P2Imag(p), a.lambda)?),
        (None, Some(k), Some(p)) => solve_geometry(alpha, k, p)?,
        _ => {
            return Err(usage(
                "give --t with one of --kappa1 and --p2, or both --kappa1 and --p2 without --t",
            ))
        }
    };
    let data = map_values(&AccessoryParams::new(alpha, t, lambda)?)?;
    Ok(match format.unwrap_or(Format::Json) {
        Format::Json => Output::Json(document(tol, value(&data)?)),
        Format::Csv => Output::Csv {
            header: vec!["alpha", "t", "lambda", "mu", "kappa1", "p2_im"],
            rows: vec![[alpha, t, lambda, data.mu, data.kappa1, data.p2.im].map(num).to_vec()],
        },
    })
}

const UNIVALENCE_COLUMNS: [&str; 10] = [
    "t",
    "lambda_min",
    "lambda_max",
    "arccot4lambda_min",
    "arccot4lambda_max",
    "sturm_lo",
    "sturm_hi",
    "nehari_lo",
    "nehari_hi",
    "status",
];

fn status(u: &UnivalenceInterval<f64>) -> &'static str {
    if u.lambda_min.is_none() || u.lambda_max.is_none() {
        "unbracketed"
    } else if !u.ordering_holds() || !u.bounds_bracket() {
        "inconsistent"
    } else {
        "ok"
    }
}

fn univalence_row(alpha: f64, t: f64, r: &scq_core::Result<UnivalenceInterval<f64>>) -> Vec<String> {
    match r {
        Ok(u) => vec![
            num(t),
            opt(u.lambda_min),
            opt(u.lambda_max),
            opt(u.lambda_min.map(arccot4)),
            opt(u.lambda_max.map(arccot4)),
            num(u.sturm_lo),
            num(u.sturm_hi),
            num(u.nehari_lo),
            num(u.nehari_hi),
            status(u).to_string(),
        ],
        Err(e) => {
            // the bounds need only the lattice, so they survive a failed scan
            let sturm = HalfPeriods::for_prevertex(t).ok().map(|hp| sturm_bounds(alpha, &hp));
            let (n_lo, n_hi) = nehari_bounds(alpha, t);
            vec![
                num(t),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                opt(sturm.map(|s| s.0)),
                opt(sturm.map(|s| s.1)),
                num(n_lo),
                num(n_hi),
                e.kind().to_string(),
            ]
        }
    }
}

fn univalence_json(t: f64, r: &scq_core::Result<UnivalenceInterval<f64>>) -> Result<Value, Failure> {
    Ok(match r {
        Ok(u) => merge(
            value(u)?,
            json!({
                "arccot4lambda_min": u.lambda_min.map(arccot4),
                "arccot4lambda_max": u.lambda_max.map(arccot4),
                "mu_min": u.mu_min(),
                "mu_max": u.mu_max(),
                "status": status(u),
            }),
        ),
        Err(e) => json!({ "t": t, "status": e.kind(), "message": e.to_string() }),
    })
}

pub fn univalence(a: &UnivalenceArgs, format: Option<Format>) -> Run {
    let tol = Tolerances::default();
    let out = run_univalence(a, format, &tol);
    (tol, out)
}

fn run_univalence(a: &UnivalenceArgs, format: Option<Format>, tol: &Tolerances) -> Result<Output, Failure> {
    let alpha = a.alpha;
    if let Some(n) = a.grid {
        let ts: Vec<f64> = (1..=n).map(|k| k as f64 * FRAC_PI_2 / (n + 1) as f64).collect();
        let rows = univalence_sweep(alpha, &ts);
        return Ok(match format.unwrap_or(Format::Csv) {
            Format::Csv => Output::Csv {
                header: UNIVALENCE_COLUMNS.to_vec(),
                rows: ts.iter().zip(&rows).map(|(&t, r)| univalence_row(alpha, t, r)).collect(),
            },
            Format::Json => {
                let rows = ts
                    .iter()
                    .zip(&rows)
                    .map(|(&t, r)| univalence_json(t, r))
                    .collect::<Result<Vec<_>, _>>()?;
                Output::Json(document(tol, json!({ "alpha": alpha, "rows": rows })))
            }
        });
    }
    let t = a.t.ok_or_else(|| usage("--t or --grid is required"))?;
    let r = scq_core::solver::univalence_interval(alpha, t);
    // a single failed interval is a failed run, not a flagged row
    let u = r.clone()?;
    Ok(match format.unwrap_or(Format::Json) {
        Format::Json => Output::Json(document(tol, univalence_json(t, &Ok(u))?)),
        Format::Csv => {
            Output::Csv { header: UNIVALENCE_COLUMNS.to_vec(), rows: vec![univalence_row(alpha, t, &r)] }
        }
    })
}

pub fn geometry(a: &GeometryArgs, format: Option<Format>) -> Run {
    let tol = Tolerances::default();
    let out = run_geometry(a, format, &tol);
    (tol, out)
}

fn run_geometry(a: &GeometryArgs, format: Option<Format>, tol: &Tolerances) -> Result<Output, Failure> {
    json_only(format, "geometry")?;
    let g = match (a.kappa1, a.theta1, a.height) {
        (k, None, Some(h)) if k.is_none_or(|k| k == 0.0) => scq_vertical_edge(h, a.alpha)?,
        (Some(k), Some(th), None) => scq_from_params(k, th, a.alpha)?,
        _ => return Err(usage("give --kappa1 with --theta1, or --height for a straight right edge")),
    };
    let extra = json!({
        "interior_angle": g.interior_angle(),
        "right_tangent": g.right_tangent(),
        "upper_tangent": g.upper_tangent(),
    });
    Ok(Output::Json(document(tol, merge(value(&g)?, extra))))
}

fn wp_zero_cmd(a: &WpZeroArgs, format: Option<Format>, tol: &Tolerances) -> Result<Output, Failure> {
    json_only(format, "wp-zero")?;
    let hp = normalized_half_periods(a.tau)?;
    let z0 = elliptic::wp_zero(&hp)?;
    let residual = wp(z0, &hp)?.norm();
    Ok(Output::Json(document(
        tol,
        json!({
            "tau": a.tau,
            "omega1": Complex64::new(hp.omega1, 0.0),
            "omega2": hp.omega2(),
            "omega3": hp.omega3(),
            "e1": hp.e1,
            "e2": hp.e2,
            "e3": hp.e3,
            "z0": z0,
            "residual": residual,
        }),
    )))
}

pub fn wp_zero(a: &WpZeroArgs, format: Option<Format>) -> Run {
    let tol = Tolerances::default();
    let out = wp_zero_cmd(a, format, &tol);
    (tol, out)
}

const TABLE_COLUMNS: [&str; 5] = ["a", "t", "s_over_pi", "Hprime0", "trace"];

fn table_row(c: &CoverData<f64>) -> Vec<String> {
    [c.a, c.t, c.s_over_pi(), c.hprime0, c.trace_comm].map(num).to_vec()
}

fn cover_json(c: &CoverData<f64>) -> Result<Value, Failure> {
    Ok(merge(value(c)?, json!({ "s_over_pi": c.s_over_pi() })))
}

pub fn fuchsian(a: &FuchsianArgs, format: Option<Format>) -> Run {
    let tol = Tolerances::default();
    let out = run_fuchsian(a, format, &tol);
    (tol, out)
}

fn run_fuchsian(a: &FuchsianArgs, format: Option<Format>, tol: &Tolerances) -> Result<Output, Failure> {
    if a.table {
        let rows = table(&TABLE_A).into_iter().collect::<scq_core::Result<Vec<_>>>()?;
        return Ok(match format.unwrap_or(Format::Csv) {
            Format::Csv => {
                Output::Csv { header: TABLE_COLUMNS.to_vec(), rows: rows.iter().map(table_row).collect() }
            }
            Format::Json => {
                let rows = rows.iter().map(cover_json).collect::<Result<Vec<_>, _>>()?;
                Output::Json(document(tol, json!({ "rows": rows })))
            }
        });
    }
    let a_val = a.a.ok_or_else(|| usage("--a or --table is required"))?;
    let cover = cover_data(a_val)?;
    match a.geodesic {
        Some(n) => {
            let pts = geodesic_from_cover(&cover, n as usize)?;
            Ok(match format.unwrap_or(Format::Csv) {
                Format::Csv => points_csv(&pts),
                Format::Json => {
                    let winding = [
                        winding_number(&pts, Complex64::new(a_val, 0.0)),
                        winding_number(&pts, Complex64::new(-a_val, 0.0)),
                    ];
                    let body = json!({ "cover": cover_json(&cover)?, "geodesic": pts, "winding": winding });
                    Output::Json(document(tol, body))
                }
            })
        }
        None => Ok(match format.unwrap_or(Format::Json) {
            Format::Json => Output::Json(document(tol, cover_json(&cover)?)),
            Format::Csv => Output::Csv { header: TABLE_COLUMNS.to_vec(), rows: vec![table_row(&cover)] },
        }),
    }
}
