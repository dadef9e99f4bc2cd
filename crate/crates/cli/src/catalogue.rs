//! Machine-readable list of experiment kinds.

use serde::Serialize;

use crate::config::ExperimentKind;

#[derive(Debug, Serialize)]
pub struct Entry {
    pub name: &'static str,
    pub description: &'static str,
    /// Experiment-specific table, if any.
    pub section: Option<&'static str>,
    pub quantities: &'static [&'static str],
    pub parameters: &'static [(&'static str, &'static str)],
}

const COMMON: [(&str, &str); 8] = [
    ("seed", "root seed; every work item draws from its own stream"),
    ("samples", "generator states per scan point (default 10)"),
    ("t", "moment orders (default [1, 2, 3])"),
    ("geometry.n_a", "sites in the unmeasured subsystem A"),
    ("geometry.n_b", "N_B: integer, list, or { from, to }"),
    ("geometry.local_dim", "local dimension (default 2)"),
    ("budget.max_dim", "largest dim_A^t for moment operators (default 4096)"),
    ("output.csv / output.json", "file names under --out (default <id>.csv / <id>.json)"),
];

pub fn entries() -> Vec<Entry> {
    ExperimentKind::ALL.iter().map(|&k| entry(k)).collect()
}

fn entry(kind: ExperimentKind) -> Entry {
    let name = kind.name();
    match kind {
        ExperimentKind::DesignScan => Entry {
            name,
            description: "mean Delta^(t) of random symmetric generators per sector, basis and N_B",
            section: Some("design"),
            quantities: &["delta"],
            parameters: &[
                ("[[sector]] kind", "identity | translation (k) | z2 (parity) | reflection (sign, site) | u1 (charge) | translation_plus_reflections"),
                ("[[basis]] family", "computational | local_product | global_haar | sigma_x | mixed_last_site | eig_tb | eig_tb_inserted | custom"),
                ("design.haar_benchmark", "also scan Haar-random generators (sector = haar)"),
            ],
        },
        ExperimentKind::ViolationScan => Entry {
            name,
            description: "violation of the sufficient condition <b|P|b> = I summed over a basis",
            section: Some("violation"),
            quantities: &["violation", "violation_normalized", "violation_profile"],
            parameters: &[("violation.profile", "emit one row per basis vector")],
        },
        ExperimentKind::MomentCheck => Entry {
            name,
            description: "sampled moments against analytic references",
            section: Some("moment"),
            quantities: &["moment_distance", "delta_prime"],
            parameters: &[(
                "moment.mode",
                "sector: sector states on N_A + N_B sites vs the sector moment; z2-sigmax: Delta' of sigma^x-measured Z2 states",
            )],
        },
        ExperimentKind::Dynamics => Entry {
            name,
            description: "Delta^(t)(tau) after a quench of the tilted-field Ising chain from |0...0>",
            section: Some("dynamics"),
            quantities: &["delta", "schmidt_delta1", "exponent", "fit_r2", "long_time_average"],
            parameters: &[
                ("dynamics.boundary", "periodic | open | weak-link"),
                ("dynamics.j_1n", "weak-link bond strength (default 0.5)"),
                ("dynamics.hx / hy / j", "couplings (default chaotic point)"),
                ("dynamics.disorder", "none | bond | field"),
                ("dynamics.variances", "disorder variances to scan"),
                ("dynamics.realizations", "disorder realizations (default 10)"),
                ("dynamics.method", "auto | dense | krylov"),
                ("dynamics.krylov_dim / krylov_tol", "Lanczos subspace size and local error tolerance"),
                ("dynamics.times / grid", "explicit times or { start, switch, end, log_points, linear_points }"),
                ("dynamics.fit_window", "power-law fit window (default [1, 4])"),
                ("dynamics.long_time_fraction", "tail fraction for the long-time average (default 0.3)"),
            ],
        },
        ExperimentKind::RmtBaseline => Entry {
            name,
            description: "mean Delta^(t) of random states with translation (and reflection) symmetry",
            section: None,
            quantities: &["rmt_delta"],
            parameters: &[("[[sector]] kind", "translation (k) | translation_plus_reflections")],
        },
        ExperimentKind::TransitionScan => Entry {
            name,
            description: "Z2 generators measured in sigma^x with the last site in the eigenbasis of alpha sigma^z + (1 - alpha) sigma^x",
            section: Some("transition"),
            quantities: &["delta", "violation_normalized"],
            parameters: &[
                ("transition.alphas", "explicit alpha values in [0, 1]"),
                ("transition.alpha_points", "evenly spaced alphas in [0, 1] (default 11)"),
            ],
        },
    }
}

#[derive(Serialize)]
struct Listing {
    common: Vec<Param>,
    experiments: Vec<Entry>,
}

#[derive(Serialize)]
struct Param {
    key: &'static str,
    doc: &'static str,
}

pub fn to_json() -> String {
    let listing = Listing {
        common: COMMON.iter().map(|&(key, doc)| Param { key, doc }).collect(),
        experiments: entries(),
    };
    serde_json::to_string_pretty(&listing).expect("catalogue serializes")
}
