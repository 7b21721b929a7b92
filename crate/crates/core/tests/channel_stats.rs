use ain_core::channel::{
    sample_mimo_channel, sample_noise, sample_real_noise, sample_scalar_channel, streams, RunSeed,
};

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[test]
fn mimo_entries_have_unit_variance() {
    let base = RunSeed::new(11, streams::CHANNEL);
    let mut total = Vec::with_capacity(100_000);
    let mut re = Vec::with_capacity(100_000);
    for i in 0..6250 {
        let ch = sample_mimo_channel(4, base.fork(i)).unwrap();
        for z in ch.h_11.iter() {
            total.push(z.norm_sqr());
            re.push(z.re);
        }
    }
    assert_eq!(total.len(), 100_000);
    let power = total.iter().sum::<f64>() / total.len() as f64;
    assert!((0.99..=1.01).contains(&power), "E|h|^2 = {power}");
    let (mean, var) = mean_var(&re);
    assert!(mean.abs() < 0.01, "real mean {mean}");
    assert!((var - 0.5).abs() < 0.01, "real-part variance {var}");
}

#[test]
fn single_antenna_channel_is_reproducible() {
    let s = RunSeed::new(5, streams::CHANNEL);
    let a = sample_mimo_channel(1, s).unwrap();
    assert_eq!(a, sample_mimo_channel(1, s).unwrap());
    assert_eq!(a.h_r1.shape(), (1, 1));
}

#[test]
fn scalar_gains_are_centered_and_nonzero() {
    let base = RunSeed::new(12, streams::CHANNEL);
    let draws: Vec<_> = (0..100_000).map(|i| sample_scalar_channel(base.fork(i))).collect();
    let hr1: Vec<f64> = draws.iter().map(|c| c.h_r1).collect();
    let (mean, var) = mean_var(&hr1);
    assert!(mean.abs() <= 0.02, "mean {mean}");
    assert!((var - 1.0).abs() < 0.02, "variance {var}");
    assert!(draws
        .iter()
        .all(|c| c.coefficients().iter().all(|&(_, h)| h != 0.0 && h.is_finite())));
}

#[test]
fn complex_noise_has_requested_variance() {
    let n = sample_noise(1_000_000, 1.0, RunSeed::new(13, streams::NOISE)).unwrap();
    let var = n.iter().map(|z| z.norm_sqr()).sum::<f64>() / n.len() as f64;
    assert!((0.997..=1.003).contains(&var), "variance {var}");

    let scaled = sample_noise(200_000, 4.0, RunSeed::new(13, streams::NOISE)).unwrap();
    let var4 = scaled.iter().map(|z| z.norm_sqr()).sum::<f64>() / scaled.len() as f64;
    assert!((var4 / 4.0 - 1.0).abs() < 0.01);
}

#[test]
fn real_noise_has_requested_variance() {
    let n = sample_real_noise(1_000_000, 2.0, RunSeed::new(14, streams::NOISE)).unwrap();
    let (mean, var) = mean_var(&n);
    assert!(mean.abs() < 0.005);
    assert!((var / 2.0 - 1.0).abs() < 0.003 * 2.0, "variance {var}");
}

#[test]
fn streams_are_uncorrelated() {
    let seed = 15;
    let a = sample_noise(200_000, 1.0, RunSeed::new(seed, streams::CHANNEL)).unwrap();
    let b = sample_noise(200_000, 1.0, RunSeed::new(seed, streams::NOISE)).unwrap();
    let corr = a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum::<ain_core::C64>() / a.len() as f64;
    // standard error is 1/sqrt(N) ≈ 2.2e-3
    assert!(corr.norm() < 0.01, "cross-correlation {corr}");
    assert_ne!(a, b);
}
