//! Analytic gradients against central finite differences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgdst_core::encoder::EncoderOutput;
use sgdst_core::features::{WideFeatureVector, NUM_FEATURES};
use sgdst_core::mrc::{self, MrcGold, MrcParams};
use sgdst_core::wd::{self, WdParams};

const EPS: f64 = 1e-5;
const TOL: f64 = 1e-4;

fn rel_err(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(1e-6)
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

fn max_rel_err(flat: &[f64], analytic: &[f64], f: impl Fn(&[f64]) -> f64) -> f64 {
    let mut worst: f64 = 0.0;
    let mut x = flat.to_vec();
    for i in 0..flat.len() {
        x[i] = flat[i] + EPS;
        let up = f(&x);
        x[i] = flat[i] - EPS;
        let down = f(&x);
        x[i] = flat[i];
        worst = worst.max(rel_err(analytic[i], (up - down) / (2.0 * EPS)));
    }
    worst
}

#[test]
fn span_head_gradients() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..60 {
        let (d, h) = (rng.gen_range(2..6), rng.gen_range(1..5));
        let n = rng.gen_range(1..9);
        let reps = EncoderOutput { cls: random_vec(&mut rng, d, 1.0), token_reps: random_vec(&mut rng, n * d, 1.0), dim: d };
        let mut params = MrcParams::zeros(d, h);
        params.unflatten(&random_vec(&mut rng, params.num_params(), 0.8));
        let gold = if rng.gen_bool(0.7) {
            let s = rng.gen_range(0..n);
            MrcGold::answer(s, rng.gen_range(s..n))
        } else {
            MrcGold::no_answer()
        };
        let fwd = mrc::forward(&reps, &params, gold.forced_start()).unwrap();
        let analytic = mrc::gradients(&fwd, &gold, &reps, &params).flatten();
        let err = max_rel_err(&params.flatten(), &analytic, |x| {
            let mut p = params.clone();
            p.unflatten(x);
            mrc::loss(&mrc::forward(&reps, &p, gold.forced_start()).unwrap(), &gold)
        });
        assert!(err <= TOL, "case {case}: relative error {err}");
    }
}

#[test]
fn ranker_gradients() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for case in 0..60 {
        let (d, k) = (rng.gen_range(2..8), rng.gen_range(1..6));
        let cls = random_vec(&mut rng, d, 1.0);
        let mut wide = WideFeatureVector::zeros();
        wide.values = (0..NUM_FEATURES).map(|_| u8::from(rng.gen_bool(0.2))).collect();
        let mut params = WdParams::zeros(d, k);
        params.use_wide = rng.gen_bool(0.7);
        params.unflatten(&random_vec(&mut rng, params.num_params(), 0.5));
        let label = rng.gen_bool(0.5);
        let fwd = wd::forward(&cls, &wide, &params).unwrap();
        let (_, g) = wd::loss_and_gradients(&fwd, label, &cls, &params);
        let err = max_rel_err(&params.flatten(), &g.flatten(), |x| {
            let mut p = params.clone();
            p.unflatten(x);
            wd::loss(&wd::forward(&cls, &wide, &p).unwrap(), label)
        });
        assert!(err <= TOL, "case {case}: relative error {err}");
    }
}
