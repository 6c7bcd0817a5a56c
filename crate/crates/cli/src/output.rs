use serde::Serialize;
use serde_json::{json, Value};

use ptlogic::compression::{EvolutionReport, VerifyMode};
use ptlogic::ground::HerbrandBase;
use ptlogic::interval::ProbInterval;
use ptlogic::prob::{format_ratio, Prob};
use ptlogic::psat::WorldDistribution;

/// A rational as a `"num/den"` string.
pub fn ratio_json(p: &Prob) -> Value {
    Value::String(format_ratio(p))
}

pub fn interval_json(i: &ProbInterval) -> Value {
    json!([ratio_json(i.lo()), ratio_json(i.hi())])
}

#[derive(Serialize)]
struct WitnessEntry {
    world: Vec<String>,
    p: String,
}

pub fn witness_json(d: &WorldDistribution, base: &HerbrandBase) -> Value {
    let entries: Vec<WitnessEntry> = d
        .iter()
        .map(|(w, p)| WitnessEntry { world: w.true_atoms(base).iter().map(ToString::to_string).collect(), p: format_ratio(p) })
        .collect();
    serde_json::to_value(entries).expect("witness entries serialize")
}

pub fn witness_text(d: &WorldDistribution, base: &HerbrandBase) -> String {
    let mut out = String::new();
    for (w, p) in d.iter() {
        let atoms: Vec<String> = w.true_atoms(base).iter().map(ToString::to_string).collect();
        out.push_str(&format!("  {{{}}}: {}\n", atoms.join(", "), format_ratio(p)));
    }
    out
}

pub fn report_json(r: &EvolutionReport) -> Value {
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            json!({
                "formula": c.formula.to_string(),
                "time": c.time,
                "mass": ratio_json(&c.mass),
                "required": interval_json(&c.required),
                "holds": c.holds,
            })
        })
        .collect();
    json!({
        "mode": match r.mode {
            VerifyMode::Literal => "literal",
            VerifyMode::Conditional => "conditional",
        },
        "holds": r.holds(),
        "model": r.model,
        "checks": checks,
    })
}
