use super::{ModelError, CAMERA_CLASSES, SNOW_CLASS};

/// Row-stochastic confusion matrix of the road-surface camera classifier.
/// Rows are the true class, columns the predicted class, both ordered as
/// [`CAMERA_CLASSES`].
#[derive(Debug, Clone, PartialEq)]
pub struct CameraConfusionMatrix([[f64; 7]; 7]);

impl CameraConfusionMatrix {
    pub fn new(rows: [[f64; 7]; 7]) -> Result<Self, ModelError> {
        for (i, row) in rows.iter().enumerate() {
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(ModelError::InvalidCameraMatrix(format!("row {} has a negative entry", CAMERA_CLASSES[i])));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(ModelError::InvalidCameraMatrix(format!(
                    "row {} sums to {sum}",
                    CAMERA_CLASSES[i]
                )));
            }
        }
        Ok(CameraConfusionMatrix(rows))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, ModelError> {
        if rows.len() != 7 || rows.iter().any(|r| r.len() != 7) {
            return Err(ModelError::InvalidCameraMatrix("expected a 7x7 matrix".into()));
        }
        let mut m = [[0.0; 7]; 7];
        for (dst, src) in m.iter_mut().zip(rows) {
            dst.copy_from_slice(src);
        }
        Self::new(m)
    }

    /// Placeholder matrix used when no measured one is supplied.
    ///
    /// For a pavement/weather class: 0.85 on the diagonal, 0.06 to the same
    /// pavement under the other weather, 0.02 to each other pavement under
    /// the same weather, and the remaining 0.05 split over the three other
    /// classes. Snow keeps 0.85 and spreads 0.05 to each wet class.
    pub fn stand_in() -> Self {
        let mut m = [[0.0; 7]; 7];
        for (truth, row) in m.iter_mut().enumerate().take(6) {
            let (pavement, weather) = (truth / 2, truth % 2);
            for (pred, p) in row.iter_mut().enumerate() {
                *p = if pred == truth {
                    0.85
                } else if pred == SNOW_CLASS {
                    0.05 / 3.0
                } else if pred / 2 == pavement {
                    0.06
                } else if pred % 2 == weather {
                    0.02
                } else {
                    0.05 / 3.0
                };
            }
        }
        m[SNOW_CLASS] = [0.0, 0.05, 0.0, 0.05, 0.0, 0.05, 0.85];
        CameraConfusionMatrix(m)
    }

    pub fn rows(&self) -> &[[f64; 7]; 7] {
        &self.0
    }

    pub fn row(&self, truth: usize) -> &[f64; 7] {
        &self.0[truth]
    }
}

impl Default for CameraConfusionMatrix {
    fn default() -> Self {
        Self::stand_in()
    }
}
