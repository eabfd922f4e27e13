//! Box-constrained minimization: projected BFGS with a Newton polish, and a
//! Nelder-Mead fallback. Problems here have at most three variables.

/// Objective value and gradient, or `None` outside the feasible region.
pub(crate) type Objective<'a> = dyn Fn(&[f64]) -> Option<(f64, Vec<f64>)> + 'a;

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub projected_grad_norm: f64,
    pub converged: bool,
    pub at_bound: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Settings {
    pub bound: f64,
    pub gtol: f64,
    pub max_iter: usize,
}

fn clamp(x: &mut [f64], bound: f64) {
    for v in x.iter_mut() {
        *v = v.clamp(-bound, bound);
    }
}

fn projected(x: &[f64], g: &[f64], bound: f64) -> Vec<f64> {
    x.iter()
        .zip(g)
        .map(|(&xi, &gi)| {
            if (xi >= bound && gi < 0.0) || (xi <= -bound && gi > 0.0) {
                0.0
            } else {
                gi
            }
        })
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub(crate) fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 || !m[piv][col].is_finite() {
            return None;
        }
        m.swap(col, piv);
        for row in 0..n {
            if row != col {
                let factor = m[row][col] / m[col][col];
                for k in col..=n {
                    m[row][k] -= factor * m[col][k];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

pub(crate) fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let cols: Option<Vec<Vec<f64>>> = (0..n)
        .map(|j| {
            let e: Vec<f64> = (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
            solve(a, &e)
        })
        .collect();
    let cols = cols?;
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

/// Central-difference Hessian of an analytic gradient, symmetrized.
pub(crate) fn fd_hessian(obj: &Objective<'_>, x: &[f64]) -> Option<Vec<Vec<f64>>> {
    let n = x.len();
    let mut h = vec![vec![0.0; n]; n];
    for i in 0..n {
        let step = 1e-5 * x[i].abs().max(1.0);
        let (mut up, mut dn) = (x.to_vec(), x.to_vec());
        up[i] += step;
        dn[i] -= step;
        let (_, gu) = obj(&up)?;
        let (_, gd) = obj(&dn)?;
        for j in 0..n {
            h[i][j] = (gu[j] - gd[j]) / (2.0 * step);
        }
    }
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (h[i][j] + h[j][i]);
            h[i][j] = avg;
            h[j][i] = avg;
        }
    }
    Some(h)
}

struct State {
    x: Vec<f64>,
    f: f64,
    g: Vec<f64>,
}

fn eval(obj: &Objective<'_>, x: Vec<f64>) -> Option<State> {
    let (f, g) = obj(&x)?;
    (f.is_finite() && g.iter().all(|v| v.is_finite())).then_some(State { x, f, g })
}

fn bfgs(obj: &Objective<'_>, start: State, s: Settings, iters: &mut usize) -> State {
    let n = start.x.len();
    let mut cur = start;
    let mut hinv = identity(n);
    let mut fresh = true;
    while *iters < s.max_iter {
        let pg = projected(&cur.x, &cur.g, s.bound);
        if norm(&pg) < s.gtol {
            break;
        }
        let mut d: Vec<f64> = (0..n).map(|i| -dot(&hinv[i], &pg)).collect();
        for i in 0..n {
            if pg[i] == 0.0 {
                d[i] = 0.0;
            }
        }
        if dot(&d, &pg) >= 0.0 {
            hinv = identity(n);
            fresh = true;
            d = pg.iter().map(|v| -v).collect();
        }
        let mut t = if fresh { 1.0f64.min(1.0 / norm(&d)) } else { 1.0 };
        let mut accepted = None;
        for _ in 0..60 {
            let mut x_new: Vec<f64> = cur.x.iter().zip(&d).map(|(x, di)| x + t * di).collect();
            clamp(&mut x_new, s.bound);
            let step: Vec<f64> = x_new.iter().zip(&cur.x).map(|(a, b)| a - b).collect();
            if norm(&step) == 0.0 {
                break;
            }
            if let Some(next) = eval(obj, x_new) {
                if next.f <= cur.f + 1e-4 * dot(&cur.g, &step) {
                    accepted = Some((next, step));
                    break;
                }
            }
            t *= 0.5;
        }
        *iters += 1;
        match accepted {
            Some((next, step)) => {
                let y: Vec<f64> = next.g.iter().zip(&cur.g).map(|(a, b)| a - b).collect();
                let sy = dot(&step, &y);
                if sy > 1e-12 * norm(&step) * norm(&y) {
                    // H+ = (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ
                    let rho = 1.0 / sy;
                    let hy: Vec<f64> = (0..n).map(|i| dot(&hinv[i], &y)).collect();
                    let yhy = dot(&y, &hy);
                    for i in 0..n {
                        for j in 0..n {
                            hinv[i][j] += -rho * (step[i] * hy[j] + hy[i] * step[j])
                                + (rho * rho * yhy + rho) * step[i] * step[j];
                        }
                    }
                    fresh = false;
                }
                cur = next;
            }
            None if !fresh => {
                hinv = identity(n);
                fresh = true;
            }
            None => break,
        }
    }
    cur
}

/// Newton steps on the gradient using a finite-difference Hessian. Drives
/// the gradient below tolerances where function-value line searches stall.
fn newton_polish(obj: &Objective<'_>, start: State, s: Settings, iters: &mut usize) -> State {
    let mut cur = start;
    for _ in 0..25 {
        let pg = projected(&cur.x, &cur.g, s.bound);
        let gnorm = norm(&pg);
        if gnorm < s.gtol || *iters >= s.max_iter {
            break;
        }
        *iters += 1;
        let free: Vec<usize> = (0..cur.x.len()).filter(|&i| pg[i] != 0.0).collect();
        let Some(h) = fd_hessian(obj, &cur.x) else { break };
        let hf: Vec<Vec<f64>> = free.iter().map(|&i| free.iter().map(|&j| h[i][j]).collect()).collect();
        let gf: Vec<f64> = free.iter().map(|&i| -cur.g[i]).collect();
        let Some(df) = solve(&hf, &gf) else { break };
        let mut t = 1.0;
        let mut improved = None;
        for _ in 0..30 {
            let mut x_new = cur.x.clone();
            for (k, &i) in free.iter().enumerate() {
                x_new[i] += t * df[k];
            }
            clamp(&mut x_new, s.bound);
            if let Some(next) = eval(obj, x_new) {
                let nn = norm(&projected(&next.x, &next.g, s.bound));
                if nn < gnorm && next.f <= cur.f + 1e-9 * cur.f.abs().max(1.0) {
                    improved = Some(next);
                    break;
                }
            }
            t *= 0.5;
        }
        match improved {
            Some(next) => cur = next,
            None => break,
        }
    }
    cur
}

/// Derivative-free simplex search on function values; infeasible points
/// count as +∞.
fn nelder_mead(obj: &Objective<'_>, x0: &[f64], s: Settings) -> Vec<f64> {
    let n = x0.len();
    let value = |x: &[f64]| {
        let mut y = x.to_vec();
        clamp(&mut y, s.bound);
        obj(&y).map(|(f, _)| f).filter(|f| f.is_finite()).unwrap_or(f64::INFINITY)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), value(x0))];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += 0.5;
        let f = value(&v);
        simplex.push((v, f));
    }
    for _ in 0..(400 * n) {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = (simplex[n].1 - simplex[0].1).abs();
        if spread.is_finite() && spread < 1e-12 * simplex[0].1.abs().max(1.0) {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|p| p.0[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };
        let xr = along(1.0);
        let fr = value(&xr);
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = value(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let xc = along(-0.5);
            let fc = value(&xc);
            if fc < simplex[n].1 {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for p in simplex.iter_mut().skip(1) {
                    p.0 = p.0.iter().zip(&best).map(|(v, b)| b + 0.5 * (v - b)).collect();
                    p.1 = value(&p.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut best = simplex[0].0.clone();
    clamp(&mut best, s.bound);
    best
}

fn finish(st: State, s: Settings, iterations: usize) -> Outcome {
    let pg = projected(&st.x, &st.g, s.bound);
    let pgn = norm(&pg);
    let at_bound = st.x.iter().any(|v| v.abs() >= s.bound);
    Outcome {
        converged: pgn < s.gtol,
        projected_grad_norm: pgn,
        at_bound,
        iterations,
        x: st.x,
        f: st.f,
    }
}

/// Minimizes `obj` over the box [-bound, bound]^n starting from `x0`.
pub(crate) fn minimize(obj: &Objective<'_>, x0: &[f64], s: Settings) -> Option<Outcome> {
    let mut start = x0.to_vec();
    clamp(&mut start, s.bound);
    let mut iters = 0;
    let st = eval(obj, start)?;
    let st = bfgs(obj, st, s, &mut iters);
    let st = newton_polish(obj, st, s, &mut iters);
    let out = finish(st, s, iters);
    if out.converged || out.at_bound {
        return Some(out);
    }
    let restart = nelder_mead(obj, &out.x, s);
    match eval(obj, restart) {
        Some(st2) if st2.f <= out.f => {
            let st2 = bfgs(obj, st2, Settings { max_iter: iters + s.max_iter, ..s }, &mut iters);
            let st2 = newton_polish(obj, st2, Settings { max_iter: iters + s.max_iter, ..s }, &mut iters);
            Some(finish(st2, s, iters))
        }
        _ => Some(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: Settings = Settings {
        bound: 30.0,
        gtol: 1e-8,
        max_iter: 500,
    };

    #[test]
    fn rosenbrock() {
        let obj = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
            Some((f, g))
        };
        let out = minimize(&obj, &[-1.2, 1.0], S).unwrap();
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-6 && (out.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn stops_at_the_box() {
        // Decreasing without bound along the first coordinate.
        let obj = |x: &[f64]| Some((-x[0] + (x[1] - 2.0).powi(2), vec![-1.0, 2.0 * (x[1] - 2.0)]));
        let out = minimize(&obj, &[0.0, 0.0], S).unwrap();
        assert!(out.at_bound);
        assert_eq!(out.x[0], 30.0);
        assert!((out.x[1] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn linear_algebra() {
        let a = vec![vec![4.0, 1.0], vec![1.0, 3.0]];
        let inv = invert(&a).unwrap();
        assert!((inv[0][0] - 3.0 / 11.0).abs() < 1e-15);
        assert!((inv[0][1] + 1.0 / 11.0).abs() < 1e-15);
        assert!(solve(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[1.0, 2.0]).is_none());
    }
}
