mod common;

use greed_core::features::{compute_features_multiscale, FeatureCache, FeatureRecord, SpatialReference};
use greed_core::video_io::{load_y4m, write_y4m, FrameRate, LumaVideo, MultiScale, Plane};
use greed_core::{compute_features, par, GreedConfig};

fn config() -> GreedConfig {
    GreedConfig::default().with_scales(vec![2, 3])
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let r = common::drifting_content(1, 96, 80, 24, 60);
    let d = common::add_noise(&r, 4.0, 2);
    let one = par::with_workers(Some(1), || compute_features(&r, &d, &config()).unwrap());
    let three = par::with_workers(Some(3), || compute_features(&r, &d, &config()).unwrap());
    assert_eq!(one.values, three.values);
    assert!(one.values.iter().all(|v| v.is_finite() && *v >= 0.0));
}

#[test]
fn streaming_pyramid_matches_in_memory() {
    let r = common::drifting_content(3, 96, 80, 20, 60);
    let d = common::add_noise(&r, 3.0, 4);
    let scales = config().scales;
    let stream = |v: &LumaVideo| MultiScale::from_frames(v.frames().iter().cloned().map(Ok), v.fps(), &scales).unwrap();
    let (a, _) = compute_features_multiscale(&stream(&r), &stream(&d), &config()).unwrap();
    let b = compute_features(&r, &d, &config()).unwrap();
    assert_eq!(a.values, b.values);
}

#[test]
fn y4m_round_trip_preserves_features() {
    let quantize = |v: &LumaVideo| {
        let frames = v.frames().iter().map(|f| Plane::new(f.width, f.height, f.data.iter().map(|x| x.round().clamp(0.0, 255.0)).collect())).collect();
        LumaVideo::new(frames, v.fps()).unwrap()
    };
    let r = quantize(&common::drifting_content(5, 64, 64, 24, 120));
    let d = quantize(&common::halve_rate(&common::add_noise(&r, 5.0, 6)));
    let dir = tempfile::tempdir().unwrap();
    let (rp, dp) = (dir.path().join("r.y4m"), dir.path().join("d.y4m"));
    write_y4m(std::fs::File::create(&rp).unwrap(), &r).unwrap();
    write_y4m(std::fs::File::create(&dp).unwrap(), &d).unwrap();
    let (r2, d2) = (load_y4m(&rp).unwrap(), load_y4m(&dp).unwrap());
    assert_eq!(d2.fps(), FrameRate::integer(60).unwrap());
    let a = compute_features(&r, &d, &config()).unwrap();
    let b = compute_features(&r2, &d2, &config()).unwrap();
    assert_eq!(a.values, b.values);

    let cache_path = dir.path().join("cache").join("features.jsonl");
    let record = FeatureRecord {
        fingerprint: config().fingerprint(),
        content_id: "c5".into(),
        reference: "r.y4m".into(),
        dist: "d.y4m".into(),
        features: b.values.clone(),
    };
    FeatureCache::append(&cache_path, &record).unwrap();
    let cache = FeatureCache::load(&cache_path).unwrap();
    assert_eq!(cache.get("r.y4m", "d.y4m").unwrap().features, b.values);
}

#[test]
fn non_integer_rate_ratio() {
    let r = common::drifting_content(7, 64, 64, 120, 120);
    let kept = greed_core::video_io::pseudo_reference_indices(120, FrameRate::integer(120).unwrap().ratio_to(&FrameRate::integer(82).unwrap()));
    assert_eq!(kept.len(), 82);
    let d = common::add_noise(&r.select(&kept, FrameRate::integer(82).unwrap()).unwrap(), 3.0, 8);
    let f = compute_features(&r, &d, &config()).unwrap();
    assert_eq!(f.values.len(), 16);
    assert!(f.values.iter().all(|v| v.is_finite() && *v >= 0.0));
    assert!(f.values.iter().any(|&v| v > 0.0));
}

#[test]
fn spatial_reference_choice_only_matters_across_rates() {
    let r = common::drifting_content(9, 96, 96, 32, 120);
    let half = common::halve_rate(&r);
    let pseudo = compute_features(&r, &half, &config()).unwrap();
    let averaged = compute_features(&r, &half, &config().with_spatial_reference(SpatialReference::Averaged)).unwrap();
    for s in 0..2 {
        assert_eq!(pseudo.sgreed(s), 0.0);
        assert!(averaged.sgreed(s) > 0.0);
        assert_eq!(pseudo.tgreed_all(s), averaged.tgreed_all(s));
    }
    let noisy = common::add_noise(&r, 4.0, 10);
    let a = compute_features(&r, &noisy, &config()).unwrap();
    let b = compute_features(&r, &noisy, &config().with_spatial_reference(SpatialReference::Averaged)).unwrap();
    assert_eq!(a.values, b.values);
}

#[test]
fn one_repeated_frame_is_mostly_temporal() {
    let r = common::drifting_content(11, 96, 96, 24, 60);
    let mut frames = r.frames().to_vec();
    frames[12] = frames[11].clone();
    let d = LumaVideo::new(frames, r.fps()).unwrap();
    let f = compute_features(&r, &d, &config()).unwrap();
    for s in 0..2 {
        let max_t = f.tgreed_all(s).iter().copied().fold(0.0, f64::max);
        assert!(max_t > 0.0);
        assert!(f.sgreed(s) < 0.1 * max_t, "scale {s}: SGREED {} vs TGREED {max_t}", f.sgreed(s));
    }
}
