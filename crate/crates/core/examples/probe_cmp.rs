// calibration probe: adiabatic-vs-BC E_N agreement as a function of gamma_f
use mof_core::couplings::compute_couplings;
use mof_core::dynamics::*;
use mof_core::gaussian::ModePair;
use mof_core::params::*;

fn preset(gf: f64) -> ModelParams {
    ModelParams {
        m_idf: 1e-3, omega_idf: 100.0, m_mirror: 10.0, mho: 0.1,
        lambda: 0.1, omega_drive: 100.0, length: 0.9765625,
        a0: 1e-4, phi0: 0.0, gamma: 0.0, temperature: 1000.0,
        gamma_i: gf, gamma_f: gf,
        coupling_kind: CouplingKind::QdotPhi,
        consts: Constants::default(), mho_prime_scale: 1.0,
    }
}

fn main() {
    let times: Vec<f64> = (0..1501).map(|k| 300.0 * k as f64 / 1500.0).collect();
    let p0 = preset(0.0);
    let bc = build_drift_bc(&p0, NoiseMode::HighT).unwrap();
    let v0bc = initial_covariance_pair(&p0, p0.mho).unwrap();
    let tb = evolve_covariance(&bc, &v0bc, &times, Method::Exact).unwrap();
    let eb = tb.entanglement_trace(ModePair::MF, 1.0, false).unwrap().e_n;
    let maxb = eb.iter().cloned().fold(0.0f64, f64::max);
    println!("max E_N_bc = {maxb:.4e}");
    for gf in [1e4, 1e6, 1e8, 1e10] {
        let p = preset(gf);
        let cs = compute_couplings(&p).unwrap();
        let sys = adiabatic_idf_elimination(&cs, &p, NoiseMode::HighT).unwrap();
        let v0 = initial_covariance_pair(&p, cs.mho_prime).unwrap();
        let tr = evolve_covariance(&sys, &v0, &times, Method::Exact).unwrap();
        let ea = tr.entanglement_trace(ModePair::MF, 1.0, false).unwrap().e_n;
        let dev = ea.iter().zip(&eb).map(|(a,b)| (a-b).abs()).fold(0.0f64, f64::max);
        println!("gamma_f = {gf:.0e}: max|dev| = {dev:.4e}  ratio = {:.3}", dev / maxb);
    }
}
