//! Fixtures shared by the benchmarks.

use tdscatter_core::dielectric::{ModulatedDielectric, MovingRod};
use tdscatter_core::vacuum::Detector;
use tdscatter_core::{Profile1D, Profile3D, Vec3};

pub fn gaussian_rod(v: f64, pointlike: bool) -> MovingRod {
    MovingRod::new(Profile1D::gaussian(1.0, 0.0, 1.0).unwrap(), v, pointlike).unwrap()
}

pub fn modulated() -> ModulatedDielectric {
    ModulatedDielectric::new(
        Profile3D::gaussian_blob(1.0, 1.0).unwrap(),
        Profile1D::gaussian(1.0, 0.0, 2.0).unwrap(),
        0.5,
    )
    .unwrap()
}

pub fn far_detector(omega: f64) -> Detector {
    let n = Vec3::new(0.2, 0.7, -0.4).normalized().unwrap();
    Detector::cartesian(omega, n * 1e3).unwrap()
}
