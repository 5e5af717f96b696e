//! Constant-velocity Kalman filter on (cx, cy, aspect, height) boxes, with
//! the measurement/process noise scaled by box height as is conventional
//! for this tracker family.

use nalgebra::{SMatrix, SVector};

pub const STD_WEIGHT_POSITION: f64 = 1.0 / 20.0;
pub const STD_WEIGHT_VELOCITY: f64 = 1.0 / 160.0;

/// Chi-square 95% quantile for 4 degrees of freedom, the customary
/// Mahalanobis gate in measurement space.
pub const CHI2_95_4DOF: f64 = 9.4877;

pub type StateVector = SVector<f64, 8>;
pub type StateCov = SMatrix<f64, 8, 8>;
pub type Measurement = SVector<f64, 4>;

#[derive(Debug, Clone, PartialEq)]
pub struct KalmanState {
    pub mean: StateVector,
    pub covariance: StateCov,
}

fn motion_matrix() -> SMatrix<f64, 8, 8> {
    let mut f = SMatrix::<f64, 8, 8>::identity();
    for i in 0..4 {
        f[(i, i + 4)] = 1.0;
    }
    f
}

fn observation_matrix() -> SMatrix<f64, 4, 8> {
    let mut h = SMatrix::<f64, 4, 8>::zeros();
    for i in 0..4 {
        h[(i, i)] = 1.0;
    }
    h
}

impl KalmanState {
    /// Starts a track from an unmatched measurement.
    pub fn initiate(measurement: &Measurement) -> Self {
        let h = measurement[3];
        let mut mean = StateVector::zeros();
        for i in 0..4 {
            mean[i] = measurement[i];
        }
        let std = [
            2.0 * STD_WEIGHT_POSITION * h,
            2.0 * STD_WEIGHT_POSITION * h,
            1e-2,
            2.0 * STD_WEIGHT_POSITION * h,
            10.0 * STD_WEIGHT_VELOCITY * h,
            10.0 * STD_WEIGHT_VELOCITY * h,
            1e-5,
            10.0 * STD_WEIGHT_VELOCITY * h,
        ];
        let mut cov = StateCov::zeros();
        for i in 0..8 {
            cov[(i, i)] = std[i] * std[i];
        }
        Self {
            mean,
            covariance: cov,
        }
    }

    /// Advances one frame under constant velocity; covariance grows by the
    /// process noise.
    pub fn predict(&mut self) {
        let h = self.mean[3];
        let std = [
            STD_WEIGHT_POSITION * h,
            STD_WEIGHT_POSITION * h,
            1e-2,
            STD_WEIGHT_POSITION * h,
            STD_WEIGHT_VELOCITY * h,
            STD_WEIGHT_VELOCITY * h,
            1e-5,
            STD_WEIGHT_VELOCITY * h,
        ];
        let mut q = StateCov::zeros();
        for i in 0..8 {
            q[(i, i)] = std[i] * std[i];
        }
        let f = motion_matrix();
        self.mean = f * self.mean;
        self.covariance = f * self.covariance * f.transpose() + q;
    }

    fn innovation_cov(&self) -> SMatrix<f64, 4, 4> {
        let h_mat = observation_matrix();
        let hh = self.mean[3];
        let std = [
            STD_WEIGHT_POSITION * hh,
            STD_WEIGHT_POSITION * hh,
            1e-1,
            STD_WEIGHT_POSITION * hh,
        ];
        let mut r = SMatrix::<f64, 4, 4>::zeros();
        for i in 0..4 {
            r[(i, i)] = std[i] * std[i];
        }
        h_mat * self.covariance * h_mat.transpose() + r
    }

    /// Standard Kalman correction.
    pub fn update(&mut self, measurement: &Measurement) {
        let h_mat = observation_matrix();
        let s = self.innovation_cov();
        let s_inv = s.try_inverse().expect("innovation covariance is SPD");
        let gain = self.covariance * h_mat.transpose() * s_inv;
        let innovation = measurement - h_mat * self.mean;
        self.mean += gain * innovation;
        let identity = StateCov::identity();
        self.covariance = (identity - gain * h_mat) * self.covariance;
    }

    /// Squared Mahalanobis distance of a measurement in (cx, cy, a, h)
    /// space; gate against [`CHI2_95_4DOF`].
    pub fn gating_distance(&self, measurement: &Measurement) -> f64 {
        let h_mat = observation_matrix();
        let s = self.innovation_cov();
        let s_inv = s.try_inverse().expect("innovation covariance is SPD");
        let y = measurement - h_mat * self.mean;
        (y.transpose() * s_inv * y)[(0, 0)]
    }

    /// Current estimate as an (left, top, width, height) box.
    pub fn bbox_ltwh(&self) -> [f64; 4] {
        let (cx, cy, a, h) = (self.mean[0], self.mean[1], self.mean[2], self.mean[3]);
        let w = a * h;
        [cx - w / 2.0, cy - h / 2.0, w, h]
    }
}

/// (cx, cy, aspect, height) measurement from an ltwh box.
pub fn measurement_from_ltwh(bbox: &[f64; 4]) -> Measurement {
    let [l, t, w, h] = *bbox;
    Measurement::from_column_slice(&[l + w / 2.0, t + h / 2.0, w / h, h])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_prediction_keeps_bbox() {
        let m = measurement_from_ltwh(&[100.0, 200.0, 40.0, 80.0]);
        let mut kf = KalmanState::initiate(&m);
        kf.predict();
        let bbox = kf.bbox_ltwh();
        for (a, b) in bbox.iter().zip(&[100.0, 200.0, 40.0, 80.0]) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn covariance_trace_grows_on_predict() {
        let m = measurement_from_ltwh(&[50.0, 60.0, 30.0, 60.0]);
        let mut kf = KalmanState::initiate(&m);
        for _ in 0..5 {
            let before = kf.covariance.trace();
            kf.predict();
            assert!(kf.covariance.trace() >= before);
        }
    }

    #[test]
    fn velocity_extrapolates_after_two_updates() {
        // Oracle: a hand-rolled scalar filter over (pos, vel) for the cx
        // component, using the same h-scaled noise schedule.
        let h_px = 80.0;
        let m0 = measurement_from_ltwh(&[-20.0, 0.0, 40.0, 80.0]); // cx = 0
        let mut kf = KalmanState::initiate(&m0);
        kf.predict();
        let m1 = Measurement::from_column_slice(&[m0[0] + 10.0, m0[1], m0[2], m0[3]]);
        kf.update(&m1);
        kf.predict();

        // Scalar replica.
        let wp = STD_WEIGHT_POSITION * h_px;
        let wv = STD_WEIGHT_VELOCITY * h_px;
        let mut x = [m0[0], 0.0];
        let mut p = [[(2.0 * wp) * (2.0 * wp), 0.0], [0.0, (10.0 * wv) * (10.0 * wv)]];
        let q = [wp * wp, wv * wv];
        let r = wp * wp;
        let predict = |x: &mut [f64; 2], p: &mut [[f64; 2]; 2]| {
            x[0] += x[1];
            let p00 = p[0][0] + 2.0 * p[0][1] + p[1][1] + q[0];
            let p01 = p[0][1] + p[1][1];
            let p11 = p[1][1] + q[1];
            *p = [[p00, p01], [p01, p11]];
        };
        predict(&mut x, &mut p);
        // update with z = cx + 10
        let z = m0[0] + 10.0;
        let s = p[0][0] + r;
        let k = [p[0][0] / s, p[0][1] / s];
        let innov = z - x[0];
        x[0] += k[0] * innov;
        x[1] += k[1] * innov;
        let p00 = (1.0 - k[0]) * p[0][0];
        let p01 = (1.0 - k[0]) * p[0][1];
        let p11 = p[1][1] - k[1] * p[0][1];
        p = [[p00, p01], [p01, p11]];
        predict(&mut x, &mut p);

        assert!(
            (kf.mean[0] - x[0]).abs() < 1e-9,
            "filter cx {} vs oracle {}",
            kf.mean[0],
            x[0]
        );
        // The gain only partially trusts one displacement sample, so the
        // extrapolation lands between the last measurement and 2x the step.
        assert!(kf.mean[0] > 10.0 && kf.mean[0] < 20.0, "cx {}", kf.mean[0]);
    }

    #[test]
    fn gating_distance_small_for_consistent_measurement() {
        let m = measurement_from_ltwh(&[100.0, 100.0, 40.0, 80.0]);
        let mut kf = KalmanState::initiate(&m);
        kf.predict();
        assert!(kf.gating_distance(&m) < 1e-9);
        let far = Measurement::from_column_slice(&[m[0] + 500.0, m[1], m[2], m[3]]);
        assert!(kf.gating_distance(&far) > CHI2_95_4DOF);
    }
}
