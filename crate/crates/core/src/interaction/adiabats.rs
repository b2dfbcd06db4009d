use super::CouplingModel;
use crate::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};

/// Adiabatic curves with labels followed by eigenvector overlap.
#[derive(Clone, Debug)]
pub struct Adiabats {
    pub r: Vec<f64>,
    /// `energies[curve][ir]`, E_h relative to the incoming threshold.
    pub energies: Vec<Vec<f64>>,
    /// Index of the channel with the largest weight, per curve and R.
    pub dominant: Vec<Vec<usize>>,
}

fn eigen_sorted(w: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = w.nrows();
    let e = SymmetricEigen::new(w);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| e.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// Eigenvalues of W(R) (centrifugal term included) along a monotone grid.
pub fn adiabats(model: &CouplingModel, r_grid: &[f64]) -> Result<Adiabats> {
    if r_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "R grid must be strictly increasing".into(),
        ));
    }
    let n = model.dim();
    let mut out = Adiabats {
        r: r_grid.to_vec(),
        energies: vec![Vec::new(); n],
        dominant: vec![Vec::new(); n],
    };
    let mut prev: Option<DMatrix<f64>> = None;
    for &r in r_grid {
        let (vals, vecs) = eigen_sorted(model.assemble_w(r)?);
        // assignment[curve] = eigenvector index
        let assignment: Vec<usize> = match &prev {
            None => (0..n).collect(),
            Some(p) => {
                let ov = p.transpose() * &vecs;
                let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        pairs.push((ov[(i, j)].abs(), i, j));
                    }
                }
                pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
                let mut asg = vec![usize::MAX; n];
                let mut used = vec![false; n];
                for (_, i, j) in pairs {
                    if asg[i] == usize::MAX && !used[j] {
                        asg[i] = j;
                        used[j] = true;
                    }
                }
                asg
            }
        };
        let mut cur = DMatrix::zeros(n, n);
        for (curve, &j) in assignment.iter().enumerate() {
            let col = vecs.column(j);
            cur.set_column(curve, &col);
            out.energies[curve].push(vals[j]);
            let dom = col
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .unwrap()
                .0;
            out.dominant[curve].push(dom);
        }
        prev = Some(cur);
    }
    Ok(out)
}

/// Sorted eigenvalues of W(R) at a single radius.
pub fn adiabatic_energies(model: &CouplingModel, r: f64) -> Result<Vec<f64>> {
    Ok(eigen_sorted(model.assemble_w(r)?).0)
}
