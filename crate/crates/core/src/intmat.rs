//! Small exact integer linear algebra used by the layout code.
//!
//! Matrices here are tiny (k ≤ a handful), so everything is dense `Vec<Vec<i64>>`
//! with `i128` intermediates where products can grow.

/// Extended gcd: returns `(g, x, y)` with `a*x + b*y = g` and `g >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    ext_gcd(a, b).0
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rational rank of the row set, together with the pivot column of each
/// independent row in echelon order.
pub fn rank_and_pivots(rows: &[Vec<i64>]) -> (usize, Vec<usize>) {
    let Some(first) = rows.first() else {
        return (0, Vec::new());
    };
    let ncols = first.len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(row, p);
        for i in row + 1..m.len() {
            if m[i][col] == 0 {
                continue;
            }
            let (a, b) = (m[row][col], m[i][col]);
            for j in col..ncols {
                m[i][j] = m[i][j] * a - m[row][j] * b;
            }
            // keep entries small
            let g = m[i].iter().fold(0i128, |g, &x| gcd_i128(g, x));
            if g > 1 {
                m[i].iter_mut().for_each(|x| *x /= g);
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    (row, pivots)
}

pub fn rank(rows: &[Vec<i64>]) -> usize {
    rank_and_pivots(rows).0
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Determinant of a square matrix (Bareiss fraction-free elimination).
pub fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Column-reduces `rows` (an m×k matrix) with unimodular column operations.
///
/// Returns `(reduced, u, u_inv, rank)` where `reduced = rows · u`, `u · u_inv = I`
/// and columns `rank..k` of `reduced` are zero. Columns `rank..k` of `u` are
/// therefore a basis of the integer kernel of `rows`.
pub fn column_reduce(rows: &[Vec<i64>], k: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>, Vec<Vec<i64>>, usize) {
    let mut a: Vec<Vec<i64>> = rows.to_vec();
    let mut u = identity(k);
    let mut u_inv = identity(k);
    let mut p = 0;
    for i in 0..a.len() {
        if p == k {
            break;
        }
        // fold every column c > p into column p for this row
        for c in p + 1..k {
            let (va, vb) = (a[i][p], a[i][c]);
            if vb == 0 {
                continue;
            }
            let (g, x, y) = ext_gcd(va, vb);
            let (pa, qb) = (va / g, vb / g);
            // col_p' = x col_p + y col_c ; col_c' = -qb col_p + pa col_c
            combine_cols(&mut a, p, c, x, y, -qb, pa);
            combine_cols(&mut u, p, c, x, y, -qb, pa);
            // inverse acts on rows: row_p' = pa row_p + qb row_c ; row_c' = -y row_p + x row_c
            combine_rows(&mut u_inv, p, c, pa, qb, -y, x);
        }
        if a[i][p] != 0 {
            if a[i][p] < 0 {
                negate_col(&mut a, p);
                negate_col(&mut u, p);
                u_inv[p].iter_mut().for_each(|v| *v = -*v);
            }
            p += 1;
        }
    }
    (a, u, u_inv, p)
}

fn combine_cols(m: &mut [Vec<i64>], a: usize, b: usize, xa: i64, xb: i64, ya: i64, yb: i64) {
    for row in m.iter_mut() {
        let (va, vb) = (row[a], row[b]);
        row[a] = xa * va + xb * vb;
        row[b] = ya * va + yb * vb;
    }
}

fn combine_rows(m: &mut [Vec<i64>], a: usize, b: usize, xa: i64, xb: i64, ya: i64, yb: i64) {
    let (ra, rb) = (m[a].clone(), m[b].clone());
    for j in 0..ra.len() {
        m[a][j] = xa * ra[j] + xb * rb[j];
        m[b][j] = ya * ra[j] + yb * rb[j];
    }
}

fn negate_col(m: &mut [Vec<i64>], c: usize) {
    m.iter_mut().for_each(|r| r[c] = -r[c]);
}

pub fn identity(k: usize) -> Vec<Vec<i64>> {
    (0..k)
        .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
        .collect()
}

/// Basis (as rows) of the integer lattice `{ y : r · y = 0 for every row r }`.
pub fn integer_kernel(rows: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
    let (_, u, _, r) = column_reduce(rows, k);
    (r..k).map(|c| u.iter().map(|row| row[c]).collect()).collect()
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
/// Zero rows are dropped; pivots are positive and entries above a pivot are
/// reduced into `[0, pivot)`.
pub fn hermite_rows(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let Some(first) = rows.first() else {
        return Vec::new();
    };
    let ncols = first.len();
    let mut m: Vec<Vec<i64>> = rows.to_vec();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        for i in r + 1..m.len() {
            let (va, vb) = (m[r][c], m[i][c]);
            if vb == 0 {
                continue;
            }
            let (g, x, y) = ext_gcd(va, vb);
            let (pa, qb) = (va / g, vb / g);
            combine_rows(&mut m, r, i, x, y, -qb, pa);
        }
        if m[r][c] == 0 {
            continue;
        }
        if m[r][c] < 0 {
            m[r].iter_mut().for_each(|v| *v = -*v);
        }
        let piv = m[r][c];
        for i in 0..r {
            let q = m[i][c].div_euclid(piv);
            if q != 0 {
                for j in 0..ncols {
                    m[i][j] -= q * m[r][j];
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}
