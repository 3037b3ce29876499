use sg_router_web::demo::{coverage_map, distance_pdf, throughput_curve};

#[test]
fn pdf_curve_is_normalized() {
    for kind in ["type1", "type2"] {
        let v = distance_pdf(kind, 1e-2, 10.0, 401).unwrap();
        assert_eq!(v.len(), 802);
        let (xs, fs): (Vec<f64>, Vec<f64>) = v.chunks(2).map(|c| (c[0], c[1])).unzip();
        assert!(fs.iter().all(|&f| f >= 0.0));
        let h = xs[1] - xs[0];
        // trapezoid
        let mass: f64 = fs.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
        assert!((mass - 1.0).abs() < 2e-2, "{kind}: {mass}");
    }
}

#[test]
fn bad_inputs_are_errors() {
    assert!(distance_pdf("type3", 1e-2, 10.0, 10).is_err());
    assert!(distance_pdf("type1", -1.0, 10.0, 10).is_err());
    assert!(throughput_curve("wifi", 1e-2, 100.0, &[0.0]).is_err());
    assert!(coverage_map("rf", 5e-4, 0.0, &[-5.0], &[0.0]).is_err());
}

#[test]
fn throughput_grows_with_power_and_stays_below_ideal() {
    let powers = [0.0, 10.0, 20.0, 30.0];
    let v = throughput_curve("rf", 5e-4, 1000.0, &powers).unwrap();
    assert_eq!(v.len(), 16);
    let ideal: Vec<f64> = v.chunks(4).map(|c| c[1]).collect();
    let analytic: Vec<f64> = v.chunks(4).map(|c| c[3]).collect();
    assert!(ideal.windows(2).all(|w| w[1] > w[0]));
    assert!(analytic.windows(2).all(|w| w[1] > w[0]));
    for c in v.chunks(4) {
        assert!(c[0] >= 1.0 && c[2] >= 1.0);
        assert!(c[3] <= c[1], "{c:?}");
    }
}

#[test]
fn coverage_map_is_monotone() {
    let d = [50.0, 200.0, 1000.0];
    let s = [-10.0, 10.0, 30.0];
    let m = coverage_map("rf", 5e-4, 0.0, &d, &s).unwrap();
    assert_eq!(m.len(), 9);
    assert!(m.iter().all(|v| (0.0..=1.0).contains(v)));
    for i in 0..3 {
        assert!(m[3 * i] <= m[3 * i + 1] && m[3 * i + 1] <= m[3 * i + 2]);
    }
    for j in 0..3 {
        assert!(m[j] >= m[3 + j] && m[3 + j] >= m[6 + j]);
    }
}
