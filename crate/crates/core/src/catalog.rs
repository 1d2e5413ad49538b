//! Named group constructors and the text formats for group input.
//!
//! Recognized names:
//!
//! * `cyclic:n`
//! * `dihedral:m` (order `m`, `m` even)
//! * `quaternion:8`, `quaternion:16`
//! * `semidihedral:16`
//! * `symmetric:n` for `n <= 5`, `alternating:n` for `n <= 6`
//! * `wreath:p` for `p` in `{2, 3}` (the regular wreath product `C_p wr C_p`)
//! * `extraspecial:27+` (exponent 3), `extraspecial:27-` (exponent 9)
//! * `SL23`, `GL23` (2x2 matrix groups over the field with three elements)
//! * `product:<a>x<b>` (direct product of two recognized names)
//!
//! Besides names, [`parse_group`] accepts two explicit formats:
//! `perm <degree>; <gen>; <gen>; ...` with generators in cycle notation, and
//! `table <n>; <n*n indices>` giving a full multiplication table row by row.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::Error;
use crate::group::{FiniteGroup, MAX_ORDER};

type Perm = Vec<u16>;

fn perm_mul(a: &Perm, b: &Perm) -> Perm {
    b.iter().map(|&i| a[i as usize]).collect()
}

fn perm_identity(degree: usize) -> Perm {
    (0..degree as u16).collect()
}

/// Cycle notation with 1-based points; fixed points are omitted.
fn cycle_label(p: &Perm) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] as usize == start {
            seen[start] = true;
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut x = p[start] as usize;
        while x != start {
            seen[x] = true;
            cycle.push(x);
            x = p[x] as usize;
        }
        out.push('(');
        out.push_str(
            &cycle.iter().map(|&i| (i + 1).to_string()).collect::<Vec<_>>().join(" "),
        );
        out.push(')');
    }
    if out.is_empty() {
        out.push('e');
    }
    out
}

/// Closes a generator list under composition and compiles the Cayley table.
fn group_from_perms(
    name: &str,
    degree: usize,
    gens: &[Perm],
    expect_order: Option<usize>,
) -> Result<Arc<FiniteGroup>, Error> {
    for g in gens {
        if g.len() != degree {
            return Err(Error::Parse("generator degree mismatch".into()));
        }
        let mut seen = vec![false; degree];
        for &i in g {
            if i as usize >= degree || seen[i as usize] {
                return Err(Error::Parse("generator is not a permutation".into()));
            }
            seen[i as usize] = true;
        }
    }
    let mut elements: Vec<Perm> = vec![perm_identity(degree)];
    let mut index: HashMap<Perm, u32> = HashMap::new();
    index.insert(elements[0].clone(), 0);
    let mut head = 0;
    while head < elements.len() {
        let current = elements[head].clone();
        for g in gens {
            let next = perm_mul(&current, g);
            if !index.contains_key(&next) {
                if elements.len() >= MAX_ORDER {
                    return Err(Error::OrderBound(elements.len() + 1, MAX_ORDER));
                }
                index.insert(next.clone(), elements.len() as u32);
                elements.push(next);
            }
        }
        head += 1;
    }
    let n = elements.len();
    if let Some(expected) = expect_order {
        assert_eq!(n, expected, "closure of {name} has unexpected order");
    }
    let mut mul = vec![0u32; n * n];
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            mul[i * n + j] = index[&perm_mul(a, b)];
        }
    }
    let labels: Vec<String> = elements.iter().map(cycle_label).collect();
    FiniteGroup::new(name, n, mul, Some(labels))
}

fn cyclic(name: &str, n: usize) -> Result<Arc<FiniteGroup>, Error> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::Parse(format!("cyclic order {n} out of range")));
    }
    let mut mul = vec![0u32; n * n];
    for i in 0..n {
        for j in 0..n {
            mul[i * n + j] = ((i + j) % n) as u32;
        }
    }
    let labels = (0..n)
        .map(|i| match i {
            0 => "e".to_string(),
            1 => "x".to_string(),
            _ => format!("x{i}"),
        })
        .collect();
    FiniteGroup::new(name, n, mul, Some(labels))
}

/// Groups `<r, s>` with `r^h = 1`, `s^2 = r^(2*h - squares...)`; covers the
/// dihedral and semidihedral series via `s r s^{-1} = r^twist` and the
/// generalized quaternion series via a central square for `s`.
fn two_generator_order_2h(
    name: &str,
    h: usize,
    twist: i64,
    s_square: usize,
) -> Result<Arc<FiniteGroup>, Error> {
    // Elements are r^a s^b with 0 <= a < h, b in {0, 1}, indexed as 2a + b.
    let n = 2 * h;
    let hh = h as i64;
    let reduce = |x: i64| x.rem_euclid(hh) as usize;
    let mut mul = vec![0u32; n * n];
    for a in 0..h as i64 {
        for b in 0..2i64 {
            for c in 0..h as i64 {
                for d in 0..2i64 {
                    // (r^a s^b)(r^c s^d): move s^b past r^c with the twist.
                    let c_twisted = if b == 0 { c } else { c * twist };
                    let mut exp = a + c_twisted;
                    let mut flips = b + d;
                    if flips == 2 {
                        exp += s_square as i64;
                        flips = 0;
                    }
                    let i = 2 * a as usize + b as usize;
                    let j = 2 * c as usize + d as usize;
                    mul[i * n + j] = (2 * reduce(exp) + flips as usize) as u32;
                }
            }
        }
    }
    let labels = (0..n)
        .map(|i| {
            let (a, b) = (i / 2, i % 2);
            match (a, b) {
                (0, 0) => "e".to_string(),
                (1, 0) => "r".to_string(),
                (_, 0) => format!("r{a}"),
                (0, 1) => "s".to_string(),
                (1, 1) => "rs".to_string(),
                _ => format!("r{a}s"),
            }
        })
        .collect();
    FiniteGroup::new(name, n, mul, Some(labels))
}

fn extraspecial_plus(name: &str) -> Result<Arc<FiniteGroup>, Error> {
    // Triples (a, b, c) over F_3 with (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a*b').
    let n = 27;
    let idx = |a: usize, b: usize, c: usize| a * 9 + b * 3 + c;
    let mut mul = vec![0u32; n * n];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for a2 in 0..3 {
                    for b2 in 0..3 {
                        for c2 in 0..3 {
                            let i = idx(a, b, c);
                            let j = idx(a2, b2, c2);
                            let k = idx((a + a2) % 3, (b + b2) % 3, (c + c2 + a * b2) % 3);
                            mul[i * n + j] = k as u32;
                        }
                    }
                }
            }
        }
    }
    let labels = (0..n)
        .map(|i| {
            let (a, b, c) = (i / 9, (i / 3) % 3, i % 3);
            let mut parts = Vec::new();
            if a > 0 {
                parts.push(if a == 1 { "x".into() } else { format!("x{a}") });
            }
            if b > 0 {
                parts.push(if b == 1 { "y".into() } else { format!("y{b}") });
            }
            if c > 0 {
                parts.push(if c == 1 { "z".into() } else { format!("z{c}") });
            }
            if parts.is_empty() {
                "e".to_string()
            } else {
                parts.join("*")
            }
        })
        .collect();
    FiniteGroup::new(name, n, mul, Some(labels))
}

#[allow(clippy::needless_range_loop)] // index arithmetic is the construction
fn extraspecial_minus(name: &str) -> Result<Arc<FiniteGroup>, Error> {
    // <r, s | r^9 = s^3 = 1, s r s^{-1} = r^4>: elements r^a s^b, index 3a + b.
    let n = 27;
    let mut mul = vec![0u32; n * n];
    let pow4 = [1usize, 4, 7]; // 4^b mod 9
    for a in 0..9 {
        for b in 0..3 {
            for c in 0..9 {
                for d in 0..3 {
                    let i = 3 * a + b;
                    let j = 3 * c + d;
                    let exp = (a + c * pow4[b]) % 9;
                    let k = 3 * exp + (b + d) % 3;
                    mul[i * n + j] = k as u32;
                }
            }
        }
    }
    let labels = (0..n)
        .map(|i| {
            let (a, b) = (i / 3, i % 3);
            match (a, b) {
                (0, 0) => "e".to_string(),
                (_, 0) => {
                    if a == 1 {
                        "r".into()
                    } else {
                        format!("r{a}")
                    }
                }
                (0, _) => {
                    if b == 1 {
                        "s".into()
                    } else {
                        format!("s{b}")
                    }
                }
                _ => {
                    let rp = if a == 1 { "r".to_string() } else { format!("r{a}") };
                    let sp = if b == 1 { "s".to_string() } else { format!("s{b}") };
                    format!("{rp}*{sp}")
                }
            }
        })
        .collect();
    FiniteGroup::new(name, n, mul, Some(labels))
}

/// 2x2 matrices over F_3; `special` restricts to determinant 1.
fn matrix_group_f3(name: &str, special: bool) -> Result<Arc<FiniteGroup>, Error> {
    let mut mats: Vec<[usize; 4]> = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let det = ((a * d) % 3 + 3 - (b * c) % 3) % 3;
                    if det == 0 {
                        continue;
                    }
                    if special && det != 1 {
                        continue;
                    }
                    mats.push([a, b, c, d]);
                }
            }
        }
    }
    // Identity first, the rest in lexicographic order.
    mats.sort();
    let id_pos = mats.iter().position(|m| *m == [1, 0, 0, 1]).unwrap();
    mats.swap(0, id_pos);
    let n = mats.len();
    let index: HashMap<[usize; 4], u32> =
        mats.iter().enumerate().map(|(i, m)| (*m, i as u32)).collect();
    let mut mul = vec![0u32; n * n];
    for (i, m) in mats.iter().enumerate() {
        for (j, k) in mats.iter().enumerate() {
            let prod = [
                (m[0] * k[0] + m[1] * k[2]) % 3,
                (m[0] * k[1] + m[1] * k[3]) % 3,
                (m[2] * k[0] + m[3] * k[2]) % 3,
                (m[2] * k[1] + m[3] * k[3]) % 3,
            ];
            mul[i * n + j] = index[&prod];
        }
    }
    let labels = mats
        .iter()
        .map(|m| format!("[{}{};{}{}]", m[0], m[1], m[2], m[3]))
        .collect();
    FiniteGroup::new(name, n, mul, Some(labels))
}

#[allow(clippy::needless_range_loop)] // index arithmetic is the construction
fn wreath(name: &str, p: usize) -> Result<Arc<FiniteGroup>, Error> {
    if p != 2 && p != 3 {
        return Err(Error::Parse("wreath:p supports p = 2 and p = 3".into()));
    }
    // Permutations of p*p points: a base p-cycle on the first block and the
    // block rotation.
    let degree = p * p;
    let mut base = perm_identity(degree);
    for i in 0..p {
        base[i] = ((i + 1) % p) as u16;
    }
    let mut shift = perm_identity(degree);
    for k in 0..p {
        for i in 0..p {
            shift[k * p + i] = (((k + 1) % p) * p + i) as u16;
        }
    }
    group_from_perms(name, degree, &[base, shift], Some(p.pow(p as u32 + 1)))
}

#[allow(clippy::needless_range_loop)] // index arithmetic is the construction
fn symmetric(name: &str, n: usize) -> Result<Arc<FiniteGroup>, Error> {
    if !(1..=5).contains(&n) {
        return Err(Error::Parse("symmetric:n supports 1 <= n <= 5".into()));
    }
    let mut gens = Vec::new();
    if n >= 2 {
        let mut t = perm_identity(n);
        t.swap(0, 1);
        gens.push(t);
    }
    if n >= 3 {
        let mut c = perm_identity(n);
        for i in 0..n {
            c[i] = ((i + 1) % n) as u16;
        }
        gens.push(c);
    }
    let expected = (1..=n).product();
    group_from_perms(name, n.max(1), &gens, Some(expected))
}

#[allow(clippy::needless_range_loop)] // index arithmetic is the construction
fn alternating(name: &str, n: usize) -> Result<Arc<FiniteGroup>, Error> {
    if !(3..=6).contains(&n) {
        return Err(Error::Parse("alternating:n supports 3 <= n <= 6".into()));
    }
    let mut three = perm_identity(n);
    three[0] = 1;
    three[1] = 2;
    three[2] = 0;
    let mut gens = vec![three];
    if n > 3 {
        let mut c = perm_identity(n);
        if n % 2 == 1 {
            for i in 0..n {
                c[i] = ((i + 1) % n) as u16;
            }
        } else {
            for i in 1..n {
                c[i] = (1 + (i % (n - 1))) as u16;
            }
        }
        gens.push(c);
    }
    let expected: usize = (1..=n).product::<usize>() / 2;
    group_from_perms(name, n, &gens, Some(expected))
}

fn direct_product(name: &str, a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> Result<Arc<FiniteGroup>, Error> {
    let (na, nb) = (a.order(), b.order());
    let n = na * nb;
    if n > MAX_ORDER {
        return Err(Error::OrderBound(n, MAX_ORDER));
    }
    let mut mul = vec![0u32; n * n];
    for i in 0..n {
        let (ia, ib) = (i / nb, i % nb);
        for j in 0..n {
            let (ja, jb) = (j / nb, j % nb);
            mul[i * n + j] = (a.mul(ia, ja) * nb + b.mul(ib, jb)) as u32;
        }
    }
    let labels = (0..n)
        .map(|i| format!("({},{})", a.label(i / nb), b.label(i % nb)))
        .collect();
    FiniteGroup::new(name, n, mul, Some(labels))
}

/// Builds a catalog group by name.
pub fn build(name: &str) -> Result<Arc<FiniteGroup>, Error> {
    let bad = |msg: &str| Error::Parse(format!("{msg}: {name}"));
    if name == "SL23" {
        return matrix_group_f3(name, true);
    }
    if name == "GL23" {
        return matrix_group_f3(name, false);
    }
    if let Some(rest) = name.strip_prefix("product:") {
        // Split at each 'x' until both halves build.
        for (pos, _) in rest.char_indices().filter(|&(_, c)| c == 'x') {
            let (left, right) = (&rest[..pos], &rest[pos + 1..]);
            if let (Ok(a), Ok(b)) = (build(left), build(right)) {
                return direct_product(name, &a, &b);
            }
        }
        return Err(bad("no valid product split"));
    }
    if let Some(rest) = name.strip_prefix("cyclic:") {
        let n: usize = rest.parse().map_err(|_| bad("bad cyclic order"))?;
        return cyclic(name, n);
    }
    if let Some(rest) = name.strip_prefix("dihedral:") {
        let m: usize = rest.parse().map_err(|_| bad("bad dihedral order"))?;
        if m < 4 || m % 2 != 0 {
            return Err(bad("dihedral order must be even and at least 4"));
        }
        return two_generator_order_2h(name, m / 2, -1, 0);
    }
    if let Some(rest) = name.strip_prefix("quaternion:") {
        let m: usize = rest.parse().map_err(|_| bad("bad quaternion order"))?;
        if m != 8 && m != 16 {
            return Err(bad("quaternion order must be 8 or 16"));
        }
        return two_generator_order_2h(name, m / 2, -1, m / 4);
    }
    if name == "semidihedral:16" {
        return two_generator_order_2h(name, 8, 3, 0);
    }
    if let Some(rest) = name.strip_prefix("symmetric:") {
        let n: usize = rest.parse().map_err(|_| bad("bad symmetric degree"))?;
        return symmetric(name, n);
    }
    if let Some(rest) = name.strip_prefix("alternating:") {
        let n: usize = rest.parse().map_err(|_| bad("bad alternating degree"))?;
        return alternating(name, n);
    }
    if let Some(rest) = name.strip_prefix("wreath:") {
        let p: usize = rest.parse().map_err(|_| bad("bad wreath prime"))?;
        return wreath(name, p);
    }
    if name == "extraspecial:27+" {
        return extraspecial_plus(name);
    }
    if name == "extraspecial:27-" {
        return extraspecial_minus(name);
    }
    Err(bad("unrecognized group name"))
}

/// The fixed catalog swept by the verification suite, filtered by order.
pub fn catalog_names(max_order: usize) -> Vec<String> {
    const NAMES: &[&str] = &[
        "cyclic:2",
        "cyclic:3",
        "cyclic:4",
        "cyclic:6",
        "cyclic:8",
        "cyclic:9",
        "cyclic:12",
        "cyclic:16",
        "dihedral:8",
        "dihedral:12",
        "dihedral:16",
        "quaternion:8",
        "quaternion:16",
        "semidihedral:16",
        "symmetric:3",
        "symmetric:4",
        "symmetric:5",
        "alternating:4",
        "alternating:5",
        "alternating:6",
        "wreath:2",
        "wreath:3",
        "extraspecial:27+",
        "extraspecial:27-",
        "SL23",
        "GL23",
        "product:cyclic:2xcyclic:2",
        "product:cyclic:2xcyclic:4",
        "product:cyclic:3xcyclic:3",
        "product:cyclic:4xcyclic:4",
        "product:cyclic:2xsymmetric:3",
        "product:cyclic:3xsymmetric:3",
    ];
    NAMES
        .iter()
        .filter(|name| build(name).map(|g| g.order() <= max_order).unwrap_or(false))
        .map(|s| s.to_string())
        .collect()
}

fn parse_perm_spec(body: &str) -> Result<Arc<FiniteGroup>, Error> {
    let mut parts = body.split(';').map(str::trim);
    let degree: usize = parts
        .next()
        .ok_or_else(|| Error::Parse("missing permutation degree".into()))?
        .parse()
        .map_err(|_| Error::Parse("bad permutation degree".into()))?;
    if degree == 0 || degree > 64 {
        return Err(Error::Parse("permutation degree out of range".into()));
    }
    let mut gens = Vec::new();
    for gen_text in parts {
        if gen_text.is_empty() {
            continue;
        }
        let mut perm = perm_identity(degree);
        for cycle_text in gen_text.split(')') {
            let cycle_text = cycle_text.trim();
            if cycle_text.is_empty() {
                continue;
            }
            let cycle_text = cycle_text
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected cycle, got {cycle_text}")))?;
            let points: Vec<usize> = cycle_text
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad point {s}"))))
                .collect::<Result<_, _>>()?;
            if points.iter().any(|&x| x == 0 || x > degree) {
                return Err(Error::Parse("cycle point out of range".into()));
            }
            let mut dedup = points.clone();
            dedup.sort_unstable();
            dedup.dedup();
            if dedup.len() != points.len() {
                return Err(Error::Parse("repeated point in cycle".into()));
            }
            // Apply the cycle after what has been read so far.
            let mut cycle_perm = perm_identity(degree);
            for w in 0..points.len() {
                cycle_perm[points[w] - 1] = (points[(w + 1) % points.len()] - 1) as u16;
            }
            perm = perm_mul(&cycle_perm, &perm);
        }
        gens.push(perm);
    }
    group_from_perms("perm-group", degree, &gens, None)
}

fn parse_table_spec(body: &str) -> Result<Arc<FiniteGroup>, Error> {
    let mut parts = body.splitn(2, ';');
    let n: usize = parts
        .next()
        .unwrap()
        .trim()
        .parse()
        .map_err(|_| Error::Parse("bad table order".into()))?;
    let entries_text = parts.next().ok_or_else(|| Error::Parse("missing table entries".into()))?;
    let entries: Vec<u32> = entries_text
        .split_whitespace()
        .map(|s| s.parse::<u32>().map_err(|_| Error::Parse(format!("bad table entry {s}"))))
        .collect::<Result<_, _>>()?;
    FiniteGroup::new("table-group", n, entries, None)
}

/// Parses a group from a catalog name, a `perm` spec or a `table` spec.
pub fn parse_group(text: &str) -> Result<Arc<FiniteGroup>, Error> {
    let text = text.trim();
    if let Some(body) = text.strip_prefix("perm") {
        return parse_perm_spec(body.trim_start());
    }
    if let Some(body) = text.strip_prefix("table") {
        return parse_table_spec(body.trim_start());
    }
    build(text)
}

/// Serializes a group as a `table` spec; parsing it back yields the identical
/// Cayley table under the canonical element ordering.
pub fn serialize_table(g: &FiniteGroup) -> String {
    let n = g.order();
    let mut out = format!("table {n};");
    for a in 0..n {
        out.push('\n');
        let row: Vec<String> = (0..n).map(|b| g.mul(a, b).to_string()).collect();
        out.push_str(&row.join(" "));
    }
    out
}
