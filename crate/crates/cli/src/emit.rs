//! CSV and JSON serialization of reports.

use bing_core::bingtree::DepthProfile;
use bing_core::exact::{fmt_decimal, fmt_exact};
use bing_core::experiments::{Audit, ComparisonRow, ExperimentReport, McReport, ScalingReport, QUANTILE_LEVELS};
use bing_core::Q;
use serde_json::{json, Value};

use crate::config::NumberFormat;

pub const CSV_HEADER: &str = "sigma,depth,c,d,a,b,img_lo,img_hi,length,disp_lo,disp_hi,phase,eps_phase";

fn num(x: &Q, fmt: NumberFormat) -> String {
    match fmt {
        NumberFormat::Exact => fmt_exact(x),
        NumberFormat::Decimal => fmt_decimal(x),
    }
}

/// One row per recorded node, in breadth-first order. The root's sigma is
/// empty; unexpanded nodes leave the clasp columns empty.
pub fn emit_csv(report: &ExperimentReport, fmt: NumberFormat) -> String {
    let mut out = String::with_capacity(64 * (report.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        let n = |x: &Q| num(x, fmt);
        let (a, b, dl, dh) = match &r.clasp {
            Some(c) => {
                let (dl, dh) = c.displacements(&r.domain);
                (n(&c.a), n(&c.b), n(&dl), n(&dh))
            }
            None => Default::default(),
        };
        let fields = [
            r.sigma.to_string(),
            r.sigma.depth().to_string(),
            n(&r.domain.lo),
            n(&r.domain.hi),
            a,
            b,
            n(&r.image.lo),
            n(&r.image.hi),
            n(&r.domain.length()),
            dl,
            dh,
            r.phase.map(|p| p.to_string()).unwrap_or_default(),
            r.eps_phase.map(|e| format!("{e:?}")).unwrap_or_default(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn profile_json(profile: &DepthProfile, fmt: NumberFormat) -> Value {
    let rows: Vec<Value> = profile
        .depths
        .iter()
        .enumerate()
        .filter_map(|(d, rec)| rec.as_ref().map(|r| (d, r)))
        .map(|(d, r)| {
            json!({
                "depth": d,
                "count": r.count,
                "max_diameter": num(&r.max_diameter, fmt),
                "min_diameter": num(&r.min_diameter, fmt),
                "mean_diameter": r.mean_diameter(),
                "max_length": num(&r.max_length, fmt),
                "max_displacement": r.max_displacement.as_ref().map(|x| num(x, fmt)),
                "mean_displacement": r.mean_displacement(),
            })
        })
        .collect();
    Value::Array(rows)
}

pub fn audit_json(a: &Audit) -> Value {
    let checks: Vec<Value> = a
        .checks()
        .into_iter()
        .map(|(name, first)| json!({ "check": name, "passed": first.is_none(), "first_offender": first.map(|id| id.to_string()) }))
        .collect();
    json!({
        "passed": a.passed(),
        "checks": checks,
        "nodes": a.nodes,
        "length_bound": a.length_bound,
        "max_length": a.max_length,
        "max_displacement": a.max_displacement,
        "max_disp_ratio": a.max_disp_ratio,
        "rounds": a.rounds,
        "max_contraction": a.max_contraction,
        "phase_ends": a.phase_ends,
        "max_phase_end_ratio": a.max_phase_end_ratio,
        "aw_classified": a.aw_classified,
        "aw_unclassified": a.aw_unclassified,
    })
}

fn stages_json(stages: &[(f64, Option<u64>)]) -> Value {
    Value::Array(stages.iter().map(|(t, s)| json!({ "target": t, "stages": s })).collect())
}

/// Run summary with the resolved config embedded.
pub fn summary_json(report: &ExperimentReport, config: &[String], fmt: NumberFormat) -> Value {
    let paths: Vec<Value> = report
        .paths
        .iter()
        .map(|p| {
            json!({
                "index": p.index,
                "final_depth": p.final_depth,
                "final_diameter": p.final_diameter,
                "phases_completed": p.phases_completed,
                "target_depths": p.target_depths,
            })
        })
        .collect();
    json!({
        "config": config,
        "strategy": report.config.strategy.name(),
        "stages_to_target": stages_json(&report.stages_to_target),
        "nodes_visited": report.nodes_visited,
        "nodes_retained": report.nodes_retained,
        "capped": report.capped,
        "max_depth_reached": report.max_depth_reached,
        "audit": audit_json(&report.audit),
        "profile": profile_json(&report.profile, fmt),
        "paths": paths,
    })
}

pub fn scaling_json(series: &[ScalingReport]) -> Value {
    let one = |s: &ScalingReport| {
        let points: Vec<Value> = s
            .points
            .iter()
            .map(|p| json!({ "eps": p.eps, "eps_L": p.eps_l, "target": p.target, "stages": p.stages }))
            .collect();
        json!({
            "label": s.label,
            "points": points,
            "fit": s.fit.as_ref().map(|f| json!({ "exponent": f.exponent, "intercept": f.intercept, "residuals": f.residuals })),
            "extrapolation": s.extrapolation.map(|(eps, stages)| json!({ "eps": eps, "stages": stages })),
        })
    };
    Value::Array(series.iter().map(one).collect())
}

pub fn scaling_csv(series: &[ScalingReport]) -> String {
    let mut out = String::from("series,eps,eps_L,target,stages\n");
    for s in series {
        for p in &s.points {
            let stages = p.stages.map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{:?},{:?},{:?},{}\n", s.label.replace(',', ";"), p.eps, p.eps_l, p.target, stages));
        }
    }
    out
}

pub fn montecarlo_csv(r: &McReport) -> String {
    let mut out = String::from("depth");
    for p in QUANTILE_LEVELS {
        out.push_str(&format!(",q{:02}", (p * 100.0).round() as u32));
    }
    out.push_str(",mean\n");
    for row in &r.rows {
        out.push_str(&row.depth.to_string());
        for x in row.quantiles {
            out.push_str(&format!(",{x:?}"));
        }
        out.push_str(&format!(",{:?}\n", row.mean));
    }
    out
}

pub fn montecarlo_json(r: &McReport, config: &[String]) -> Value {
    let last = r.rows.last();
    json!({
        "config": config,
        "trials": r.trials,
        "depth": r.depth,
        "seed": r.seed,
        "quantile_levels": QUANTILE_LEVELS,
        "monotone_violations": r.monotone_violations,
        "final_quantiles": last.map(|row| row.quantiles.to_vec()),
        "final_mean": last.map(|row| row.mean),
    })
}

pub fn comparison_csv(rows: &[(String, ComparisonRow)]) -> String {
    let mut out = String::from("label,strategy,target,stages,max_displacement,max_length,displacement_bound,bound_held\n");
    for (label, r) in rows {
        let (bound, held) = match r.displacement_bound {
            Some((b, ok)) => (format!("{b:?}"), ok.to_string()),
            None => Default::default(),
        };
        for (t, s) in &r.stages_to_target {
            let s = s.map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!("{label},{},{t:?},{s},{:?},{:?},{bound},{held}\n", r.strategy, r.max_displacement, r.max_length));
        }
    }
    out
}

pub fn comparison_json(rows: &[(String, ComparisonRow)], config: &[String]) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|(label, r)| {
            json!({
                "label": label,
                "strategy": r.strategy,
                "stages_to_target": stages_json(&r.stages_to_target),
                "max_displacement": r.max_displacement,
                "max_length": r.max_length,
                "displacement_bound": r.displacement_bound.map(|(b, ok)| json!({ "bound": b, "held": ok })),
            })
        })
        .collect();
    json!({ "config": config, "rows": rows })
}

/// Pretty JSON with a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
