//! Cyclic Jacobi eigenvalue iteration.

/// Eigenvalues of a real symmetric matrix given row-major, sorted ascending.
#[allow(clippy::needless_range_loop)]
pub fn symmetric_eigenvalues(matrix: &[Vec<f64>]) -> Vec<f64> {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    for row in &a {
        assert_eq!(row.len(), n, "matrix must be square");
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

/// Eigenvalues of a complex Hermitian matrix `re + i·im`.
///
/// The real embedding `[[re, -im], [im, re]]` has every eigenvalue of the
/// Hermitian matrix twice; one of each pair is returned.
pub fn hermitian_eigenvalues(re: &[Vec<f64>], im: &[Vec<f64>]) -> Vec<f64> {
    let n = re.len();
    let mut big = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            big[i][j] = re[i][j];
            big[i + n][j + n] = re[i][j];
            big[i][j + n] = -im[i][j];
            big[i + n][j] = im[i][j];
        }
    }
    let doubled = symmetric_eigenvalues(&big);
    doubled.into_iter().step_by(2).collect()
}

/// ½·Σ|λ| over the eigenvalues of the Hermitian difference `a − b`.
pub fn trace_distance_hermitian(
    a_re: &[Vec<f64>],
    a_im: &[Vec<f64>],
    b_re: &[Vec<f64>],
    b_im: &[Vec<f64>],
) -> f64 {
    let diff = |x: &[Vec<f64>], y: &[Vec<f64>]| -> Vec<Vec<f64>> {
        x.iter()
            .zip(y)
            .map(|(r, s)| r.iter().zip(s).map(|(u, v)| u - v).collect())
            .collect()
    };
    let eig = hermitian_eigenvalues(&diff(a_re, b_re), &diff(a_im, b_im));
    0.5 * eig.iter().map(|l| l.abs()).sum::<f64>()
}

/// Trace distance between real symmetric matrices.
pub fn trace_distance_real(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let diff: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(u, v)| u - v).collect())
        .collect();
    0.5 * symmetric_eigenvalues(&diff)
        .iter()
        .map(|l| l.abs())
        .sum::<f64>()
}
