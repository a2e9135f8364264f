//! Nelder–Mead simplex minimization.
//!
//! Used wherever the objective has kinks (square roots of determinants that
//! touch zero), so no derivative information is assumed.

/// Result of a minimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub max_iter: usize,
    /// Stop once the spread of function values over the simplex falls below this.
    pub f_tol: f64,
    /// ... and the simplex diameter falls below this.
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iter: 200,
            f_tol: 1e-15,
            x_tol: 1e-12,
        }
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

impl NelderMead {
    pub fn new(max_iter: usize) -> Self {
        Self {
            max_iter,
            ..Self::default()
        }
    }

    /// Minimizes `f` starting from an axis-aligned simplex of edge `step`
    /// around `start`.
    pub fn minimize<F>(&self, mut f: F, start: &[f64], step: f64) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let dim = start.len();
        if dim == 0 {
            return Minimum {
                x: Vec::new(),
                value: f(&[]),
                iterations: 0,
            };
        }
        // vertex i occupies points[i*dim..(i+1)*dim]
        let mut points: Vec<f64> = Vec::with_capacity((dim + 1) * dim);
        for i in 0..=dim {
            points.extend_from_slice(start);
            if i > 0 {
                points[i * dim + i - 1] += step;
            }
        }
        let mut values: Vec<f64> = points.chunks(dim).map(&mut f).collect();

        let mut order: Vec<usize> = (0..=dim).collect();
        let mut scratch_points = points.clone();
        let mut scratch_values = values.clone();
        let mut centroid = vec![0.0; dim];
        let mut trial = vec![0.0; dim];
        let mut second = vec![0.0; dim];

        let mut iterations = 0;
        while iterations < self.max_iter {
            iterations += 1;
            for (k, o) in order.iter_mut().enumerate() {
                *o = k;
            }
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            for (k, &i) in order.iter().enumerate() {
                scratch_points[k * dim..(k + 1) * dim].copy_from_slice(&points[i * dim..(i + 1) * dim]);
                scratch_values[k] = values[i];
            }
            std::mem::swap(&mut points, &mut scratch_points);
            std::mem::swap(&mut values, &mut scratch_values);

            let spread = values[dim] - values[0];
            let best_point = &points[..dim];
            let diameter = (1..=dim)
                .map(|i| distance(&points[i * dim..(i + 1) * dim], best_point))
                .fold(0.0, f64::max);
            if spread.abs() <= self.f_tol && diameter <= self.x_tol {
                break;
            }

            for (k, c) in centroid.iter_mut().enumerate() {
                *c = (0..dim).map(|i| points[i * dim + k]).sum::<f64>() / dim as f64;
            }
            let worst = dim * dim;
            let along = |coeff: f64, out: &mut [f64], points: &[f64]| {
                for k in 0..dim {
                    out[k] = centroid[k] + coeff * (centroid[k] - points[worst + k]);
                }
            };

            along(REFLECT, &mut trial, &points);
            let f_reflected = f(&trial);
            if f_reflected < values[0] {
                along(EXPAND, &mut second, &points);
                let f_expanded = f(&second);
                if f_expanded < f_reflected {
                    points[worst..].copy_from_slice(&second);
                    values[dim] = f_expanded;
                } else {
                    points[worst..].copy_from_slice(&trial);
                    values[dim] = f_reflected;
                }
                continue;
            }
            if f_reflected < values[dim - 1] {
                points[worst..].copy_from_slice(&trial);
                values[dim] = f_reflected;
                continue;
            }

            let coeff = if f_reflected < values[dim] {
                CONTRACT * REFLECT
            } else {
                -CONTRACT
            };
            along(coeff, &mut second, &points);
            let f_contracted = f(&second);
            if f_contracted < values[dim].min(f_reflected) {
                points[worst..].copy_from_slice(&second);
                values[dim] = f_contracted;
                continue;
            }

            for i in 1..=dim {
                for k in 0..dim {
                    points[i * dim + k] = points[k] + SHRINK * (points[i * dim + k] - points[k]);
                }
                values[i] = f(&points[i * dim..(i + 1) * dim]);
            }
        }

        let best = (0..=dim)
            .min_by(|&a, &b| values[a].total_cmp(&values[b]))
            .unwrap_or(0);
        Minimum {
            x: points[best * dim..(best + 1) * dim].to_vec(),
            value: values[best],
            iterations,
        }
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
