//! Finite groups stored as Cayley tables.
//!
//! Every group uses element index `0` for the identity. Named families
//! (`C<n>`, `D<n>`, `S<n>`, `Q8`) and direct products are materialized as
//! full multiplication tables, so all later algorithms only ever see indices.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest group order materialized as a Cayley table.
pub const MAX_GROUP_ORDER: usize = 5040;

/// A finite group given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    inverses: Vec<u32>,
    name: Option<String>,
    names: Vec<String>,
    standard_gens: Vec<usize>,
}

/// Cayley-table file contents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CayleyTableFile {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl FiniteGroup {
    /// Validates a raw table and builds the group. If the identity is not
    /// element `0`, the elements are renumbered so that it is.
    pub fn from_table(table: Vec<Vec<usize>>, name: Option<String>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(axiom("empty table"));
        }
        if n > MAX_GROUP_ORDER {
            return Err(Error::GroupTooLarge {
                order: n,
                cap: MAX_GROUP_ORDER,
            });
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(axiom(format!(
                    "row {a} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(axiom(format!("row {a} contains out-of-range entry {bad}")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| axiom("no two-sided identity"))?;
        // Swap `identity` and 0 so the identity lands on index 0.
        let relabel = |x: usize| {
            if x == identity {
                0
            } else if x == 0 {
                identity
            } else {
                x
            }
        };
        let mut flat = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                flat[relabel(a) * n + relabel(b)] = relabel(table[a][b]) as u32;
            }
        }
        // New index `i` holds original element `relabel(i)`, since relabel is an involution.
        let names = (0..n).map(|i| relabel(i).to_string()).collect();
        Self::from_flat(n, flat, name, names, Vec::new())
    }

    /// Reads a Cayley-table JSON file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        let file: CayleyTableFile = serde_json::from_str(&text).map_err(|source| Error::Json {
            context: path.display().to_string(),
            source,
        })?;
        if file.order != file.table.len() {
            return Err(axiom(format!(
                "declared order {} but table has {} rows",
                file.order,
                file.table.len()
            )));
        }
        Self::from_table(file.table, file.name)
    }

    fn from_flat(
        order: usize,
        table: Vec<u32>,
        name: Option<String>,
        names: Vec<String>,
        standard_gens: Vec<usize>,
    ) -> Result<Self> {
        validate_table(order, &table)?;
        let mut inverses = vec![0u32; order];
        for a in 0..order {
            let row = &table[a * order..(a + 1) * order];
            let b = row
                .iter()
                .position(|&x| x == 0)
                .expect("latin rows contain the identity");
            inverses[a] = b as u32;
        }
        Ok(Self {
            order,
            table,
            inverses,
            name,
            names,
            standard_gens,
        })
    }

    /// Cyclic group of order `n`, elements are residues.
    pub fn cyclic(n: usize) -> Result<Self> {
        check_named_order(n, n)?;
        let table = (0..n)
            .flat_map(|a| (0..n).map(move |b| ((a + b) % n) as u32))
            .collect();
        let names = (0..n).map(|a| a.to_string()).collect();
        let gens = if n > 1 { vec![1] } else { Vec::new() };
        Self::from_flat(n, table, Some(format!("C{n}")), names, gens)
    }

    /// Dihedral group of order `2n`; element `(b, a)` is the map `x -> (-1)^a x + b` on `Z_n`
    /// and sits at index `a * n + b`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(spec_err(format!("D{n}"), "dihedral index must be positive"));
        }
        let order = 2 * n;
        check_named_order(order, order)?;
        let mut table = vec![0u32; order * order];
        for x in 0..order {
            let (a1, b1) = (x / n, x % n);
            for y in 0..order {
                let (a2, b2) = (y / n, y % n);
                let b = if a1 == 0 {
                    (b1 + b2) % n
                } else {
                    (b1 + n - b2) % n
                };
                let a = (a1 + a2) % 2;
                table[x * order + y] = (a * n + b) as u32;
            }
        }
        let names = (0..order)
            .map(|x| {
                let (a, b) = (x / n, x % n);
                let rot = match b {
                    0 => String::new(),
                    1 => "r".to_owned(),
                    _ => format!("r^{b}"),
                };
                match (a, rot.is_empty()) {
                    (0, true) => "e".to_owned(),
                    (0, false) => rot,
                    (_, true) => "s".to_owned(),
                    (_, false) => format!("{rot}*s"),
                }
            })
            .collect();
        let mut gens = Vec::new();
        if n > 1 {
            gens.push(1);
        }
        gens.push(n);
        Self::from_flat(order, table, Some(format!("D{n}")), names, gens)
    }

    /// Symmetric group on `n` symbols, elements in lexicographic order of their
    /// one-line notation; `(st)(x) = s(t(x))`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(spec_err("S0", "symmetric degree must be positive"));
        }
        let order = (1..=n).try_fold(1usize, |acc, k| {
            let next = acc.checked_mul(k)?;
            (next <= MAX_GROUP_ORDER).then_some(next)
        });
        let Some(order) = order else {
            return Err(Error::GroupTooLarge {
                order: usize::MAX,
                cap: MAX_GROUP_ORDER,
            });
        };
        let perms = lexicographic_permutations(n);
        debug_assert_eq!(perms.len(), order);
        let index: HashMap<&[u8], usize> = perms
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_slice(), i))
            .collect();
        let mut table = vec![0u32; order * order];
        let mut buf = vec![0u8; n];
        for (x, s) in perms.iter().enumerate() {
            for (y, t) in perms.iter().enumerate() {
                for i in 0..n {
                    buf[i] = s[t[i] as usize];
                }
                table[x * order + y] = index[buf.as_slice()] as u32;
            }
        }
        let names = perms.iter().map(|p| cycle_notation(p)).collect();
        let mut gens = Vec::new();
        if n >= 2 {
            let mut swap: Vec<u8> = (0..n as u8).collect();
            swap.swap(0, 1);
            gens.push(index[swap.as_slice()]);
        }
        if n >= 3 {
            let cycle: Vec<u8> = (0..n as u8).map(|i| (i + 1) % n as u8).collect();
            gens.push(index[cycle.as_slice()]);
        }
        Self::from_flat(order, table, Some(format!("S{n}")), names, gens)
    }

    /// Quaternion group `{±1, ±i, ±j, ±k}`.
    pub fn quaternion() -> Result<Self> {
        // Unit products: UNIT[a][b] = (sign flip, unit) with units 1,i,j,k = 0..3.
        const UNIT: [[(u8, u8); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        // index = 2 * unit + sign
        let mut table = vec![0u32; 64];
        for x in 0..8 {
            for y in 0..8 {
                let (u1, s1) = (x / 2, x % 2);
                let (u2, s2) = (y / 2, y % 2);
                let (flip, u) = UNIT[u1][u2];
                let sign = (s1 + s2 + flip as usize) % 2;
                table[x * 8 + y] = (2 * u as usize + sign) as u32;
            }
        }
        let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        Self::from_flat(8, table, Some("Q8".into()), names, vec![2, 4])
    }

    /// Direct product of the factors; element `(x_1, .., x_m)` has mixed-radix index
    /// with the last factor least significant.
    pub fn direct_product(factors: &[FiniteGroup]) -> Result<Self> {
        match factors {
            [] => return Self::cyclic(1),
            [single] => return Ok(single.clone()),
            _ => {}
        }
        let order = factors.iter().try_fold(1usize, |acc, f| {
            acc.checked_mul(f.order).filter(|&o| o <= MAX_GROUP_ORDER)
        });
        let Some(order) = order else {
            return Err(Error::GroupTooLarge {
                order: factors.iter().map(|f| f.order).product(),
                cap: MAX_GROUP_ORDER,
            });
        };
        let decode = |mut x: usize| {
            let mut coords = vec![0usize; factors.len()];
            for (slot, f) in coords.iter_mut().zip(factors).rev() {
                *slot = x % f.order;
                x /= f.order;
            }
            coords
        };
        let encode = |coords: &[usize]| {
            coords
                .iter()
                .zip(factors)
                .fold(0usize, |acc, (&c, f)| acc * f.order + c)
        };
        let all: Vec<Vec<usize>> = (0..order).map(decode).collect();
        let mut table = vec![0u32; order * order];
        let mut buf = vec![0usize; factors.len()];
        for (x, cx) in all.iter().enumerate() {
            for (y, cy) in all.iter().enumerate() {
                for (i, f) in factors.iter().enumerate() {
                    buf[i] = f.mul(cx[i], cy[i]);
                }
                table[x * order + y] = encode(&buf) as u32;
            }
        }
        let names = all
            .iter()
            .map(|c| {
                let parts: Vec<&str> = c
                    .iter()
                    .zip(factors)
                    .map(|(&e, f)| f.element_name(e))
                    .collect();
                format!("({})", parts.join(","))
            })
            .collect();
        let mut gens = Vec::new();
        for (i, f) in factors.iter().enumerate() {
            for &g in &f.standard_gens {
                let mut coords = vec![0usize; factors.len()];
                coords[i] = g;
                gens.push(encode(&coords));
            }
        }
        let name = factors
            .iter()
            .map(|f| f.name.clone().unwrap_or_else(|| format!("G{}", f.order)))
            .collect::<Vec<_>>()
            .join("x");
        Self::from_flat(order, table, Some(name), names, gens)
    }

    /// Parses a group description such as `C4`, `C2^3`, `S4`, `D5xC3`, `Q8` or
    /// `file:<path>`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let trimmed = spec.trim();
        if let Some(path) = trimmed.strip_prefix("file:") {
            return Self::from_file(Path::new(path.trim()));
        }
        let compact: String = trimmed.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(spec_err(spec, "empty spec"));
        }
        let mut factors = Vec::new();
        for term in compact.split(['x', '×']) {
            let (atom, power) = match term.split_once('^') {
                Some((atom, k)) => {
                    let k: usize = k
                        .parse()
                        .map_err(|_| spec_err(spec, format!("bad exponent in `{term}`")))?;
                    if k == 0 {
                        return Err(spec_err(spec, "exponent must be positive"));
                    }
                    (atom, k)
                }
                None => (term, 1),
            };
            let group = parse_atom(spec, atom)?;
            for _ in 0..power {
                factors.push(group.clone());
            }
        }
        let mut group = Self::direct_product(&factors)?;
        group.name = Some(compact);
        Ok(group)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Name for display: the given name or `G<order>`.
    pub fn display_name(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| format!("G{}", self.order))
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }

    pub fn element_name(&self, x: usize) -> &str {
        &self.names[x]
    }

    /// Canonical generators of the named family (`e1`, `e2`, ... in generator lists).
    pub fn standard_generators(&self) -> &[usize] {
        &self.standard_gens
    }

    /// Cayley table as nested rows.
    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|a| (0..self.order).map(|b| self.mul(a, b)).collect())
            .collect()
    }

    pub fn to_file(&self) -> CayleyTableFile {
        CayleyTableFile {
            order: self.order,
            table: self.table_rows(),
            name: self.name.clone(),
        }
    }

    /// Resolves an element token: an element name, `e<i>` for the i-th standard
    /// generator (1-based), or a raw index.
    pub fn parse_element(&self, token: &str) -> Result<usize> {
        let compact: String = token.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(i) = self.names.iter().position(|n| *n == compact) {
            return Ok(i);
        }
        if let Some(k) = compact
            .strip_prefix('e')
            .and_then(|s| s.parse::<usize>().ok())
        {
            if (1..=self.standard_gens.len()).contains(&k) {
                return Ok(self.standard_gens[k - 1]);
            }
        }
        match compact.parse::<usize>() {
            Ok(i) if i < self.order => Ok(i),
            _ => Err(Error::UnknownElement(token.to_owned())),
        }
    }

    /// Parses a comma-separated generator list; commas inside brackets do not split.
    pub fn parse_elements(&self, list: &str) -> Result<Vec<usize>> {
        split_top_level(list)
            .into_iter()
            .map(|t| self.parse_element(t))
            .collect()
    }

    /// Closure of `elems` together with the identity under multiplication.
    pub fn generated_subgroup(&self, elems: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order];
        member[0] = true;
        let mut members = vec![0usize];
        let mut frontier = 0;
        while frontier < members.len() {
            let x = members[frontier];
            frontier += 1;
            for &s in elems {
                let y = self.mul(x, s);
                if !member[y] {
                    member[y] = true;
                    members.push(y);
                }
            }
        }
        members.sort_unstable();
        members
    }

    /// Whether `elems` generate the whole group.
    pub fn generates(&self, elems: &[usize]) -> bool {
        self.generated_subgroup(elems).len() == self.order
    }

    /// True iff `seq` generates the group and dropping any one entry does not.
    pub fn is_irredundant(&self, seq: &[usize]) -> bool {
        if !self.generates(seq) {
            return false;
        }
        (0..seq.len()).all(|skip| {
            let rest: Vec<usize> = seq
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &x)| x)
                .collect();
            !self.generates(&rest)
        })
    }

    /// Removes redundant entries until irredundant, trying the latest position first so
    /// that earlier entries are kept.
    pub fn irredundant_reduce(&self, seq: &[usize]) -> Result<GeneratingSequence> {
        if let Some(&bad) = seq.iter().find(|&&x| x >= self.order) {
            return Err(Error::UnknownElement(bad.to_string()));
        }
        if !self.generates(seq) {
            return Err(Error::Generators(format!(
                "{:?} does not generate {}",
                seq,
                self.display_name()
            )));
        }
        let mut current = seq.to_vec();
        'outer: loop {
            for skip in (0..current.len()).rev() {
                let mut rest = current.clone();
                rest.remove(skip);
                if self.generates(&rest) {
                    current = rest;
                    continue 'outer;
                }
            }
            break;
        }
        GeneratingSequence::new(self, current)
    }

    /// Least `m >= 1` with `x^m = e`.
    pub fn element_order(&self, x: usize) -> usize {
        let mut m = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul(y, x);
            m += 1;
        }
        m
    }

    /// Whether some element has order equal to the group order.
    pub fn is_cyclic(&self) -> bool {
        (0..self.order).any(|x| self.element_order(x) == self.order)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

/// An ordered irredundant generating sequence `(h_1, .., h_d)` of a group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratingSequence {
    group_order: usize,
    elems: Vec<usize>,
}

impl GeneratingSequence {
    /// Validates generation, irredundancy, and distinct non-identity entries.
    pub fn new(group: &FiniteGroup, elems: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = elems.iter().find(|&&x| x >= group.order()) {
            return Err(Error::UnknownElement(bad.to_string()));
        }
        if elems.contains(&group.identity()) && group.order() > 1 {
            return Err(Error::Generators(
                "the identity cannot be a generator".into(),
            ));
        }
        let mut sorted = elems.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != elems.len() {
            return Err(Error::Generators(
                "generators must be pairwise distinct".into(),
            ));
        }
        if !group.generates(&elems) {
            return Err(Error::Generators(format!(
                "{:?} does not generate {}",
                elems,
                group.display_name()
            )));
        }
        if !group.is_irredundant(&elems) {
            return Err(Error::Generators(format!(
                "{:?} is not irredundant: some generator can be dropped",
                elems
            )));
        }
        Ok(Self {
            group_order: group.order(),
            elems,
        })
    }

    pub fn elems(&self) -> &[usize] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn group_order(&self) -> usize {
        self.group_order
    }
}

fn axiom(reason: impl Into<String>) -> Error {
    Error::GroupAxiom {
        reason: reason.into(),
        triple: None,
    }
}

fn spec_err(spec: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::GroupSpec {
        spec: spec.into(),
        reason: reason.into(),
    }
}

fn check_named_order(order: usize, reported: usize) -> Result<()> {
    if order == 0 {
        return Err(spec_err("C0", "order must be positive"));
    }
    if order > MAX_GROUP_ORDER {
        return Err(Error::GroupTooLarge {
            order: reported,
            cap: MAX_GROUP_ORDER,
        });
    }
    Ok(())
}

fn parse_atom(spec: &str, atom: &str) -> Result<FiniteGroup> {
    if atom == "Q8" {
        return FiniteGroup::quaternion();
    }
    let mut chars = atom.chars();
    let family = chars.next().ok_or_else(|| spec_err(spec, "empty factor"))?;
    let n: usize = chars
        .as_str()
        .parse()
        .map_err(|_| spec_err(spec, format!("cannot read factor `{atom}`")))?;
    match family {
        'C' | 'Z' => FiniteGroup::cyclic(n),
        'D' => FiniteGroup::dihedral(n),
        'S' => FiniteGroup::symmetric(n),
        _ => Err(spec_err(spec, format!("unknown family in `{atom}`"))),
    }
}

/// Checks latin rows/columns, identity at 0, and associativity by Light's test
/// over a greedily chosen generating set.
fn validate_table(n: usize, table: &[u32]) -> Result<()> {
    let mut seen = vec![usize::MAX; n];
    for a in 0..n {
        for b in 0..n {
            let v = table[a * n + b] as usize;
            if v >= n {
                return Err(axiom(format!("entry {a}*{b} = {v} out of range")));
            }
            if seen[v] == a {
                return Err(axiom(format!("row {a} repeats element {v}")));
            }
            seen[v] = a;
        }
    }
    seen.fill(usize::MAX);
    for b in 0..n {
        for a in 0..n {
            let v = table[a * n + b] as usize;
            if seen[v] == b {
                return Err(axiom(format!("column {b} repeats element {v}")));
            }
            seen[v] = b;
        }
    }
    for x in 0..n {
        if table[x] as usize != x || table[x * n] as usize != x {
            return Err(axiom("element 0 is not a two-sided identity"));
        }
    }
    let mul = |a: usize, b: usize| table[a * n + b] as usize;
    // Greedy generating set under right multiplication.
    let mut member = vec![false; n];
    member[0] = true;
    let mut members = vec![0usize];
    let mut gens: Vec<usize> = Vec::new();
    for cand in 0..n {
        if member[cand] {
            continue;
        }
        gens.push(cand);
        member[cand] = true;
        members.push(cand);
        let mut frontier = 0;
        while frontier < members.len() {
            let x = members[frontier];
            frontier += 1;
            for &s in &gens {
                let y = mul(x, s);
                if !member[y] {
                    member[y] = true;
                    members.push(y);
                }
            }
        }
    }
    for &s in &gens {
        for a in 0..n {
            let as_ = mul(a, s);
            for b in 0..n {
                if mul(as_, b) != mul(a, mul(s, b)) {
                    return Err(Error::GroupAxiom {
                        reason: format!("({a}*{s})*{b} != {a}*({s}*{b})"),
                        triple: Some((a, s, b)),
                    });
                }
            }
        }
    }
    Ok(())
}

fn lexicographic_permutations(n: usize) -> Vec<Vec<u8>> {
    let mut current: Vec<u8> = (0..n as u8).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (0..n.saturating_sub(1))
            .rev()
            .find(|&i| current[i] < current[i + 1])
        else {
            return out;
        };
        let j = (i + 1..n)
            .rev()
            .find(|&j| current[j] > current[i])
            .expect("successor exists");
        current.swap(i, j);
        current[i + 1..].reverse();
        out.push(current.clone());
    }
}

/// Disjoint cycle notation with 1-based symbols; the identity is `e`.
fn cycle_notation(perm: &[u8]) -> String {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut out = String::new();
    let sep = if n > 9 { " " } else { "" };
    for start in 0..n {
        if seen[start] || perm[start] as usize == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push((x + 1).to_string());
            x = perm[x] as usize;
        }
        out.push('(');
        out.push_str(&cycle.join(sep));
        out.push(')');
    }
    if out.is_empty() {
        "e".into()
    } else {
        out
    }
}

fn split_top_level(list: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in list.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(list[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let tail = list[start..].trim();
    if !tail.is_empty() || !parts.is_empty() {
        parts.push(tail);
    }
    parts.retain(|p| !p.is_empty());
    parts
}
