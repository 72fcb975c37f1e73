//! Single-point report: derived parameters, thresholds, moments, entanglement,
//! semiclassical comparison and the near-threshold prediction.

use crate::error::CliResult;
use crate::settings::Settings;
use crate::sweep::fmt_num;
use nopo_core::entangle::minimized_variance;
use nopo_core::nearthreshold::{
    near_threshold_params, near_threshold_vmin, predicted_minimum_location, validity_check,
    Validity, F1_LOWER_BOUND,
};
use nopo_core::semiclassical::{classical_photon_number, delta_n_of};
use nopo_core::{derive, evaluate, Complex64, Regime};
use std::fmt::Write;

struct Report(String);

impl Report {
    fn section(&mut self, name: &str) {
        let _ = writeln!(self.0, "[{name}]");
    }
    fn num(&mut self, key: &str, v: f64) {
        let _ = writeln!(self.0, "{key} = {}", fmt_num(v));
    }
    fn complex(&mut self, key: &str, z: Complex64) {
        self.num(&format!("{key}.re"), z.re);
        self.num(&format!("{key}.im"), z.im);
    }
    fn text(&mut self, key: &str, v: &str) {
        let _ = writeln!(self.0, "{key} = {v}");
    }
}

/// Build the report text. Any module error aborts the report.
pub fn point_report(settings: &Settings) -> CliResult<String> {
    let params = settings.params();
    let opts = settings.series_options();
    let d = derive(&params)?;
    let m = evaluate(d.lambda, d.p, params.pump_phase, &opts)?;
    let ent = minimized_variance(&m);
    let sc = classical_photon_number(d.lambda, d.p);

    let mut r = Report(String::new());
    let _ = writeln!(r.0, "# nopo point {}", settings.echo());
    r.section("params");
    r.complex("gamma_bar", d.gamma_bar);
    r.complex("gamma_bar3", d.gamma_bar3);
    r.complex("lambda", d.lambda);
    r.complex("epsilon", d.epsilon);
    r.num("p", d.p);
    r.num("eS", d.e_s);
    r.text("regime", d.regime.as_str());
    for w in &d.warnings {
        r.text("warning", &w.to_string());
    }
    r.section("thresholds");
    let t = d.thresholds;
    match d.regime {
        Regime::Monostable => r.num("p_threshold", t.p_mono),
        _ => {
            r.num("p_bistable_lower", t.p_bistable_lower);
            r.num("p_bistable_upper", t.p_bistable_upper);
        }
    }
    r.num("e_threshold", t.e_threshold);
    r.num("eS_threshold", t.e_s_threshold);
    r.section("moments");
    r.num("n", m.n);
    r.complex("pair_moment", m.pair_moment);
    r.num("p_dn_dp", m.p_dn_dp);
    r.num("deficit", m.deficit);
    r.text("route", m.route.as_str());
    r.text("method", m.stats.method.as_str());
    r.num("j_mean", m.stats.j_mean);
    r.num("j_var", m.stats.j_var);
    r.text("j_peak", &m.stats.j_peak.to_string());
    r.text("terms_used", &m.stats.terms_used.to_string());
    r.num("tail_bound", m.stats.tail_bound);
    r.section("entanglement");
    r.num("v_min", ent.v_min);
    r.num("theta_sum", ent.theta_sum);
    r.num("theta", ent.theta_relative);
    r.text("phase_from_limit", &ent.phase_from_limit.to_string());
    r.text(
        "entangled_sufficient",
        &ent.entangled_sufficient.to_string(),
    );
    r.text("verdict", ent.verdict.as_str());
    r.section("semiclassical");
    r.num("n_cl", sc.n_cl);
    r.num("delta_n", delta_n_of(&m));
    r.text("branch", sc.branch.as_str());
    r.text("mu", &sc.mu.to_string());
    r.num("xi", sc.xi);
    if d.regime == Regime::Monostable {
        r.section("near_threshold");
        let i = d.p / d.lambda.norm_sqr();
        let np = near_threshold_params(d.lambda, i)?;
        r.num("s", np.s);
        r.num("c", np.c);
        r.num("i_over_ith", i);
        r.num(
            "predicted_min_location",
            predicted_minimum_location(d.lambda)?,
        );
        match validity_check(d.lambda, i) {
            Validity::Valid => {
                r.text("validity", "Valid");
                r.num("f1_lower_bound", F1_LOWER_BOUND);
                r.num(
                    "v_min_closed_form_lower_bound",
                    near_threshold_vmin(d.lambda, i, F1_LOWER_BOUND)?,
                );
            }
            Validity::Invalid(reason) => r.text("validity", &format!("Invalid({reason:?})")),
        }
    }
    Ok(r.0)
}

/// Pull `key = value` from a report.
pub fn report_value<'a>(report: &'a str, key: &str) -> Option<&'a str> {
    report.lines().find_map(|l| {
        l.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(" = "))
    })
}
