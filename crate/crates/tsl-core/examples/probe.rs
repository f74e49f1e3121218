use std::time::Instant;
use tsl_core::binding::*;
use tsl_core::curve::*;
use tsl_core::num::QuadratureConfig;
use tsl_core::Params;

fn main() {
    let cfg = QuadratureConfig::default();
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("identity");

    match which {
        "identity" => {
            // criterion 1 cost: 20 grid points, one (n,p)
            for (n, p) in [(3u32, 2.0f64), (5, 3.0)] {
                let prm = Params::new(n, p).unwrap();
                let c = fundamental_constants(&prm, &cfg).unwrap();
                let lo = c.t_0 / 4.0;
                let hi = 10.0 * c.t_e;
                let t0 = Instant::now();
                let mut worst = 0.0f64;
                for k in 0..20 {
                    let t = lo + (hi - lo) * k as f64 / 19.0;
                    let r = verify_transport_identity(t, &prm, &cfg).unwrap();
                    worst = worst.max(r);
                }
                println!("identity ({n},{p}): worst residual {worst:.3e} in {:?}", t0.elapsed());
            }
        }
        "binding" => {
            let prm = Params::new(3, 2.0).unwrap();
            let c = fundamental_constants(&prm, &cfg).unwrap();
            let t0 = Instant::now();
            let scan = scan_binding_grid(c.t_0, 32, 0.05, &prm, &cfg).unwrap();
            println!(
                "32x32 at T0 (3,2): min gap {:.4e}, uncertified {}, in {:?}",
                scan.min_gap,
                scan.uncertified.len(),
                t0.elapsed()
            );
            let t0 = Instant::now();
            let scan = scan_binding_grid(3.0 * c.t_e, 32, 0.05, &prm, &cfg).unwrap();
            println!(
                "32x32 at 3TE (3,2): min gap {:.4e}, uncertified {}, in {:?}",
                scan.min_gap,
                scan.uncertified.len(),
                t0.elapsed()
            );
        }
        "shape" => {
            let prm = Params::new(3, 2.0).unwrap();
            let c = fundamental_constants(&prm, &cfg).unwrap();
            let grid = default_shape_grid(&c, 200, 30.0);
            println!("grid size {}", grid.len());
            let t0 = Instant::now();
            let scan = scan_curve(&grid, &prm, &cfg).unwrap();
            println!(
                "shape (3,2): all pass {} tail-1 {:.3e} in {:?}; failures: {:?}",
                scan.shape.all_pass(),
                scan.shape.tail_ratio_final_minus_one,
                t0.elapsed(),
                scan.shape.failures.iter().take(4).collect::<Vec<_>>()
            );
        }
        "split" => {
            let prm = Params::new(3, 2.0).unwrap();
            let c = fundamental_constants(&prm, &cfg).unwrap();
            let spec = symmetric_split(3.0 * c.t_e, &prm).unwrap();
            let t0 = Instant::now();
            let rows = split_energy_convergence(&spec, &[4.0, 8.0, 16.0, 32.0, 64.0], &prm, &cfg).unwrap();
            for r in &rows {
                println!(
                    "R {:5.1}: wE {:.8e} excess {:.4e} rel {:.3e} above-inf {:.3e}",
                    r.r_cut,
                    r.w_energy,
                    r.excess,
                    r.excess / (r.w_energy - r.excess),
                    r.above_infimum
                );
            }
            println!("in {:?}", t0.elapsed());
        }
        _ => println!("unknown probe"),
    }
}
