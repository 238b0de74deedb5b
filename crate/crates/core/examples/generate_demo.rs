//! Regenerate the bundled demo dataset (`data/demo_panel.csv`,
//! `data/demo_forecasts.csv`). Fully deterministic; run from the
//! workspace root:
//!
//! ```text
//! cargo run -p lpma --example generate_demo
//! ```

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const SEED: u64 = 0x1985_2010;
const COUNTRIES: [&str; 11] =
    ["AT", "BE", "DE", "ES", "FI", "FR", "GR", "IE", "IT", "NL", "PT"];
const QUARTERS: usize = 104; // 1985-Q1 .. 2010-Q4

struct Ar1 {
    rho: f64,
    sigma: f64,
    value: f64,
}

impl Ar1 {
    fn new(rng: &mut ChaCha8Rng, rho: f64, sigma: f64) -> Self {
        let z: f64 = StandardNormal.sample(rng);
        Ar1 { rho, sigma, value: sigma / (1.0 - rho * rho).sqrt() * z }
    }

    fn step(&mut self, rng: &mut ChaCha8Rng) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.value = self.rho * self.value + self.sigma * z;
        self.value
    }
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut panel = String::from("country,period,cpi,rgdp,reer,unemp,stir,rr,almp,epl\n");

    for (ci, country) in COUNTRIES.iter().enumerate() {
        // Two countries join the panel a year late.
        let start = if ci >= 9 { 4 } else { 0 };
        let mut rate_shock = Ar1::new(&mut rng, 0.5, 0.35);
        let mut stir: f64 = 4.0 + 2.0 * (ci as f64 / 10.0 - 0.5);

        // Macro growth processes (percent per quarter).
        let mut g_cpi = Ar1::new(&mut rng, 0.5, 0.35);
        let mut g_gdp = Ar1::new(&mut rng, 0.3, 0.8);
        let mut g_reer = Ar1::new(&mut rng, 0.2, 1.2);
        let mut g_unemp = Ar1::new(&mut rng, 0.4, 2.5);
        // Policy growth processes.
        let mut g_rr = Ar1::new(&mut rng, 0.1, 0.9);
        let mut g_almp = Ar1::new(&mut rng, 0.1, 4.0);
        let mut g_epl = Ar1::new(&mut rng, 0.2, 0.7);

        let mut cpi: f64 = 90.0 + ci as f64;
        let mut rgdp: f64 = 100.0;
        let mut reer: f64 = 100.0;
        let mut unemp: f64 = 8.0 + (ci % 5) as f64;
        let mut rr: f64 = 55.0 + (ci % 3) as f64 * 5.0;
        let mut almp: f64 = 25.0 + (ci % 4) as f64 * 5.0;
        let mut epl: f64 = 2.0 + (ci % 3) as f64 * 0.4;

        let mut prev_policy_growth = 0.0f64;
        for q in 0..QUARTERS {
            let d_rate = rate_shock.step(&mut rng) - 0.02 * (stir - 4.0);
            stir = (stir + d_rate).max(0.25);
            let loosening = if d_rate < 0.0 { 1.0 } else { 0.0 };

            let policy_growth = g_rr.step(&mut rng);
            // Policy effects on macro growth differ with the rate regime.
            let mix = policy_growth + 0.5 * prev_policy_growth;
            let grow_cpi = 0.5 + g_cpi.step(&mut rng) - 0.08 * mix + 0.05 * mix * loosening;
            let grow_gdp = 0.55 + g_gdp.step(&mut rng) + 0.06 * mix * loosening - 0.03 * mix;
            let grow_reer = g_reer.step(&mut rng) + 0.04 * mix;
            let grow_unemp = g_unemp.step(&mut rng) + 0.10 * mix - 0.12 * mix * loosening;
            prev_policy_growth = policy_growth;

            cpi *= (grow_cpi / 100.0).exp();
            rgdp *= (grow_gdp / 100.0).exp();
            reer *= (grow_reer / 100.0).exp();
            unemp = (unemp * (grow_unemp / 100.0).exp()).max(1.0);
            rr = (rr * (policy_growth / 100.0).exp()).clamp(20.0, 90.0);
            almp = (almp * (g_almp.step(&mut rng) / 100.0).exp()).clamp(5.0, 200.0);
            epl = (epl * (g_epl.step(&mut rng) / 100.0).exp()).clamp(0.5, 5.0);

            if q < start {
                continue;
            }
            let year = 1985 + q / 4;
            let quarter = q % 4 + 1;
            writeln!(
                panel,
                "{country},{year}-Q{quarter},{cpi:.6},{rgdp:.6},{reer:.6},{unemp:.6},{stir:.6},{rr:.6},{almp:.6},{epl:.6}"
            )
            .unwrap();
        }
    }
    std::fs::create_dir_all("data").unwrap();
    std::fs::write("data/demo_panel.csv", panel).unwrap();

    // Forecast editions covering every quarter of the panel.
    let mut forecasts = String::from("country,edition,target_year,value\n");
    for country in COUNTRIES {
        for year in 1984..=2010 {
            for (month, target) in [(12u8, year + 1), (6u8, year + 1)] {
                let z: f64 = StandardNormal.sample(&mut rng);
                let value = 2.0 + 1.2 * z;
                writeln!(forecasts, "{country},{year}-{month:02},{target},{value:.4}").unwrap();
            }
        }
    }
    std::fs::write("data/demo_forecasts.csv", forecasts).unwrap();
    println!("wrote data/demo_panel.csv and data/demo_forecasts.csv");
}
