use crate::error::{Error, Result};

/// Orthonormal right-handed frame binding the first eigenfunctions
/// `Z_k(n) = e_k · n` to the grid's Cartesian axes.
///
/// `Z₁` points from the black hole toward the sphere's centre. The default
/// puts `Z₁` on the grid pole, so `Z₂ Z₃ = xy` is the single harmonic
/// `(l, m) = (2, -2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    axes: [[f64; 3]; 3],
}

impl Default for Frame {
    fn default() -> Self {
        Self {
            axes: [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        }
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

impl Frame {
    pub fn new(e1: [f64; 3], e2: [f64; 3], e3: [f64; 3]) -> Result<Self> {
        let axes = [e1, e2, e3];
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot(axes[i], axes[j]) - want).abs() > 1e-12 {
                    return Err(Error::InvalidArgument("frame is not orthonormal".into()));
                }
            }
        }
        let c = cross(e1, e2);
        if dot(c, e3) < 0.0 {
            return Err(Error::InvalidArgument("frame is left-handed".into()));
        }
        Ok(Self { axes })
    }

    pub fn axes(&self) -> [[f64; 3]; 3] {
        self.axes
    }

    /// `(Z₁, Z₂, Z₃)` at unit vector `n`.
    #[inline]
    pub fn coordinates(&self, n: [f64; 3]) -> [f64; 3] {
        [
            dot(self.axes[0], n),
            dot(self.axes[1], n),
            dot(self.axes[2], n),
        ]
    }

    /// Rotates the frame by `angle` about `axis` (Rodrigues).
    pub fn rotated(&self, axis: [f64; 3], angle: f64) -> Result<Self> {
        let len = dot(axis, axis).sqrt();
        if len == 0.0 {
            return Err(Error::InvalidArgument("rotation axis is zero".into()));
        }
        let k = [axis[0] / len, axis[1] / len, axis[2] / len];
        let (s, c) = angle.sin_cos();
        let rot = |v: [f64; 3]| {
            let kxv = cross(k, v);
            let kv = dot(k, v);
            [
                v[0] * c + kxv[0] * s + k[0] * kv * (1.0 - c),
                v[1] * c + kxv[1] * s + k[1] * kv * (1.0 - c),
                v[2] * c + kxv[2] * s + k[2] * kv * (1.0 - c),
            ]
        };
        Frame::new(rot(self.axes[0]), rot(self.axes[1]), rot(self.axes[2]))
    }
}
