use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::GroupError;

/// Default cap on enumerated group orders, overridable with `STMOD_GROUP_BOUND`.
pub const DEFAULT_GROUP_BOUND: usize = 20_000;

pub fn group_bound() -> usize {
    std::env::var("STMOD_GROUP_BOUND")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_GROUP_BOUND)
}

const DEFAULT_NAMES: [&str; 6] = ["x", "y", "z", "w", "v", "u"];

pub(crate) fn default_names(count: usize) -> Vec<String> {
    (0..count)
        .map(|i| DEFAULT_NAMES.get(i).map_or_else(|| format!("g{i}"), |s| s.to_string()))
        .collect()
}

/// Named group constructions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupPreset {
    Cyclic(usize),
    Symmetric(usize),
    Alternating(usize),
    Quaternion,
    DirectProduct(Vec<GroupPreset>),
}

impl fmt::Display for GroupPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupPreset::Cyclic(n) => write!(f, "C{n}"),
            GroupPreset::Symmetric(n) => write!(f, "S{n}"),
            GroupPreset::Alternating(n) => write!(f, "A{n}"),
            GroupPreset::Quaternion => write!(f, "Q8"),
            GroupPreset::DirectProduct(fs) => {
                let parts: Vec<String> = fs.iter().map(|g| g.to_string()).collect();
                write!(f, "{}", parts.join("x"))
            }
        }
    }
}

impl FromStr for GroupPreset {
    type Err = GroupError;

    /// `C9`, `S3`, `A4`, `Q8`, and products such as `C3xS3`.
    fn from_str(s: &str) -> Result<Self, GroupError> {
        let parts: Vec<&str> = s.split(['x', 'X', '×']).map(str::trim).collect();
        if parts.len() > 1 {
            let factors = parts.iter().map(|p| p.parse()).collect::<Result<Vec<_>, _>>()?;
            return Ok(GroupPreset::DirectProduct(factors));
        }
        let bad = || GroupError::BadPreset(s.to_string());
        let t = s.trim();
        if t.eq_ignore_ascii_case("Q8") {
            return Ok(GroupPreset::Quaternion);
        }
        let (kind, num) = t.split_at(t.char_indices().nth(1).map_or(t.len(), |(i, _)| i));
        let n: usize = num.parse().map_err(|_| bad())?;
        match kind {
            "C" | "c" if n >= 1 => Ok(GroupPreset::Cyclic(n)),
            "S" | "s" if n >= 1 => Ok(GroupPreset::Symmetric(n)),
            "A" | "a" if n >= 1 => Ok(GroupPreset::Alternating(n)),
            _ => Err(bad()),
        }
    }
}

type Perm = Vec<u16>;

fn cycle_perm(deg: usize, cycle: &[usize]) -> Perm {
    let mut p: Perm = (0..deg as u16).collect();
    for (i, &a) in cycle.iter().enumerate() {
        p[a] = cycle[(i + 1) % cycle.len()] as u16;
    }
    p
}

impl GroupPreset {
    /// Degree and generating permutations.
    pub(crate) fn permutations(&self) -> (usize, Vec<Perm>) {
        match self {
            GroupPreset::Cyclic(n) => {
                let cyc: Vec<usize> = (0..*n).collect();
                (*n, vec![cycle_perm(*n, &cyc)])
            }
            GroupPreset::Symmetric(n) => {
                let n = *n;
                if n < 2 {
                    return (n, vec![(0..n as u16).collect()]);
                }
                let cyc: Vec<usize> = (0..n).collect();
                let mut gens = vec![cycle_perm(n, &cyc)];
                if n > 2 {
                    gens.push(cycle_perm(n, &[0, 1]));
                }
                (n, gens)
            }
            GroupPreset::Alternating(n) => {
                let n = *n;
                if n < 3 {
                    return (n, vec![(0..n as u16).collect()]);
                }
                (n, (2..n).map(|i| cycle_perm(n, &[0, 1, i])).collect())
            }
            GroupPreset::Quaternion => {
                // right regular action on normal forms a^i b^j, index i + 4j
                let mult = |(i, j): (usize, usize), (k, l): (usize, usize)| -> (usize, usize) {
                    let k = if j == 1 { (4 - k) % 4 } else { k };
                    let mut e = i + k;
                    if j + l == 2 {
                        e += 2;
                    }
                    (e % 4, (j + l) % 2)
                };
                let act = |g: (usize, usize)| -> Perm {
                    (0..8)
                        .map(|x| {
                            let (i, j) = mult((x % 4, x / 4), g);
                            (i + 4 * j) as u16
                        })
                        .collect()
                };
                (8, vec![act((1, 0)), act((0, 1))])
            }
            GroupPreset::DirectProduct(factors) => {
                let parts: Vec<(usize, Vec<Perm>)> = factors.iter().map(|f| f.permutations()).collect();
                let deg: usize = parts.iter().map(|(d, _)| d).sum();
                let mut gens = Vec::new();
                let mut offset = 0;
                for (d, ps) in &parts {
                    for p in ps {
                        let mut g: Perm = (0..deg as u16).collect();
                        for (i, &v) in p.iter().enumerate() {
                            g[offset + i] = v + offset as u16;
                        }
                        gens.push(g);
                    }
                    offset += d;
                }
                (deg, gens)
            }
        }
    }
}

/// How a group was specified; kept for serialization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupDescriptor {
    Preset {
        preset: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        names: Option<Vec<String>>,
    },
    Permutations {
        degree: usize,
        permutations: Vec<Vec<u16>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        names: Option<Vec<String>>,
    },
}

/// A finite permutation group with enumerated elements. Element 0 is the identity;
/// the remaining elements are listed breadth-first by right multiplication with
/// the generators in declared order.
#[derive(Clone)]
pub struct GroupData {
    descriptor: GroupDescriptor,
    generator_names: Vec<String>,
    degree: usize,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
    generator_indices: Vec<usize>,
    words: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    mult: Option<Vec<u32>>,
}

impl fmt::Debug for GroupData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupData({}, order {})", self.name(), self.order())
    }
}

impl PartialEq for GroupData {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.generator_perms().eq(other.generator_perms())
    }
}
impl Eq for GroupData {}

// products are tabulated up to this order
const TABLE_LIMIT: usize = 2048;

fn compose(a: &[u16], b: &[u16]) -> Perm {
    b.iter().map(|&x| a[x as usize]).collect()
}

impl GroupData {
    pub fn from_preset(preset: &GroupPreset) -> Result<GroupData, GroupError> {
        Self::from_preset_bounded(preset, group_bound())
    }

    pub fn from_preset_bounded(preset: &GroupPreset, bound: usize) -> Result<GroupData, GroupError> {
        let (deg, gens) = preset.permutations();
        let names = default_names(gens.len());
        let desc = GroupDescriptor::Preset { preset: preset.to_string(), names: None };
        Self::build(desc, deg, gens, names, bound)
    }

    pub fn from_permutations(degree: usize, gens: Vec<Perm>, names: Option<Vec<String>>) -> Result<GroupData, GroupError> {
        Self::from_permutations_bounded(degree, gens, names, group_bound())
    }

    pub fn from_permutations_bounded(
        degree: usize,
        gens: Vec<Perm>,
        names: Option<Vec<String>>,
        bound: usize,
    ) -> Result<GroupData, GroupError> {
        for g in &gens {
            let mut seen = vec![false; degree];
            if g.len() != degree || g.iter().any(|&x| (x as usize) >= degree || std::mem::replace(&mut seen[x as usize], true)) {
                return Err(GroupError::BadPermutation(format!("{g:?} is not a permutation of degree {degree}")));
            }
        }
        let desc = GroupDescriptor::Permutations { degree, permutations: gens.clone(), names: names.clone() };
        let names = names.unwrap_or_else(|| default_names(gens.len()));
        Self::build(desc, degree, gens, names, bound)
    }

    pub fn from_descriptor(desc: &GroupDescriptor) -> Result<GroupData, GroupError> {
        match desc {
            GroupDescriptor::Preset { preset, names } => {
                let mut g = Self::from_preset(&preset.parse()?)?;
                if let Some(n) = names {
                    g = g.with_names(n.clone())?;
                }
                Ok(g)
            }
            GroupDescriptor::Permutations { degree, permutations, names } => {
                Self::from_permutations(*degree, permutations.clone(), names.clone())
            }
        }
    }

    fn build(desc: GroupDescriptor, degree: usize, gens: Vec<Perm>, names: Vec<String>, bound: usize) -> Result<GroupData, GroupError> {
        if names.len() != gens.len() {
            return Err(GroupError::BadPermutation(format!("{} names for {} generators", names.len(), gens.len())));
        }
        let id: Perm = (0..degree as u16).collect();
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut words = vec![Vec::new()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for (s, g) in gens.iter().enumerate() {
                let prod = compose(&elements[e], g);
                if !index.contains_key(&prod) {
                    if elements.len() >= bound {
                        return Err(GroupError::GroupTooLarge { bound });
                    }
                    let i = elements.len();
                    index.insert(prod.clone(), i);
                    elements.push(prod);
                    let mut w = words[e].clone();
                    w.push(s);
                    words.push(w);
                    queue.push_back(i);
                }
            }
        }
        let generator_indices = gens.iter().map(|g| index[g]).collect();
        let inverse = elements
            .iter()
            .map(|p| {
                let mut inv = vec![0u16; degree];
                for (i, &x) in p.iter().enumerate() {
                    inv[x as usize] = i as u16;
                }
                index[&inv]
            })
            .collect();
        let n = elements.len();
        let mult = (n <= TABLE_LIMIT).then(|| {
            let mut t = vec![0u32; n * n];
            for i in 0..n {
                for j in 0..n {
                    t[i * n + j] = index[&compose(&elements[i], &elements[j])] as u32;
                }
            }
            t
        });
        Ok(GroupData {
            descriptor: desc,
            generator_names: names,
            degree,
            elements,
            index,
            generator_indices,
            words,
            inverse,
            mult,
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<GroupData, GroupError> {
        if names.len() != self.generator_names.len() {
            return Err(GroupError::BadPermutation(format!(
                "{} names for {} generators",
                names.len(),
                self.generator_names.len()
            )));
        }
        match &mut self.descriptor {
            GroupDescriptor::Preset { names: n, .. } | GroupDescriptor::Permutations { names: n, .. } => {
                *n = Some(names.clone())
            }
        }
        self.generator_names = names;
        Ok(self)
    }

    pub fn name(&self) -> String {
        match &self.descriptor {
            GroupDescriptor::Preset { preset, .. } => preset.clone(),
            GroupDescriptor::Permutations { .. } => format!("PermGroup({})", self.order()),
        }
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }
    pub fn order(&self) -> usize {
        self.elements.len()
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn num_generators(&self) -> usize {
        self.generator_indices.len()
    }
    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }
    pub fn generator_indices(&self) -> &[usize] {
        &self.generator_indices
    }
    pub fn element(&self, i: usize) -> &[u16] {
        &self.elements[i]
    }
    pub fn generator_perms(&self) -> impl Iterator<Item = &[u16]> {
        self.generator_indices.iter().map(|&i| self.elements[i].as_slice())
    }
    /// Generator word (indices into the generator list) reaching element `i`.
    pub fn word(&self, i: usize) -> &[usize] {
        &self.words[i]
    }
    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }
    pub fn index_of(&self, perm: &[u16]) -> Option<usize> {
        self.index.get(perm).copied()
    }

    /// Index of `elements[a] * elements[b]` (apply `b` first).
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.mult {
            Some(t) => t[a * self.order() + b] as usize,
            None => self.index[&compose(&self.elements[a], &self.elements[b])],
        }
    }

    pub fn element_order(&self, i: usize) -> usize {
        let mut k = 1;
        let mut e = i;
        while e != 0 {
            e = self.mul(e, i);
            k += 1;
        }
        k
    }

    /// Parse a word such as `x^3`, `x*z`, `y^-1 z`.
    pub fn parse_word(&self, s: &str) -> Result<Vec<(usize, i64)>, GroupError> {
        let bad = |why: &str| GroupError::BadWord(format!("{s:?}: {why}"));
        let chars: Vec<char> = s.chars().collect();
        let mut pos = 0;
        let mut out = Vec::new();
        while pos < chars.len() {
            let c = chars[pos];
            if c.is_whitespace() || c == '*' || c == '.' {
                pos += 1;
                continue;
            }
            if c == '1' && out.is_empty() && chars.len() == 1 {
                return Ok(out);
            }
            let rest: String = chars[pos..].iter().collect();
            let (gen, len) = self
                .generator_names
                .iter()
                .enumerate()
                .filter(|(_, n)| rest.starts_with(n.as_str()))
                .max_by_key(|(_, n)| n.len())
                .map(|(i, n)| (i, n.chars().count()))
                .ok_or_else(|| bad("unknown generator"))?;
            pos += len;
            let mut exp = 1i64;
            if pos < chars.len() && chars[pos] == '^' {
                pos += 1;
                let start = pos;
                if pos < chars.len() && chars[pos] == '-' {
                    pos += 1;
                }
                while pos < chars.len() && chars[pos].is_ascii_digit() {
                    pos += 1;
                }
                let num: String = chars[start..pos].iter().collect();
                exp = num.parse().map_err(|_| bad("bad exponent"))?;
            }
            out.push((gen, exp));
        }
        Ok(out)
    }

    /// Element index of a parsed word.
    pub fn eval_word(&self, word: &[(usize, i64)]) -> usize {
        let mut e = 0;
        for &(g, exp) in word {
            let gi = self.generator_indices[g];
            let ord = self.element_order(gi) as i64;
            for _ in 0..exp.rem_euclid(ord) {
                e = self.mul(e, gi);
            }
        }
        e
    }

    /// Subgroup generated by the given elements, with those elements as generators.
    pub fn subgroup(&self, gens: &[usize], names: Vec<String>) -> Result<GroupData, GroupError> {
        let perms = gens.iter().map(|&g| self.elements[g].clone()).collect();
        Self::from_permutations_bounded(self.degree, perms, Some(names), group_bound())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(s: &str) -> GroupData {
        GroupData::from_preset(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn preset_orders() {
        for (s, n) in [("C9", 9), ("A4", 12), ("Q8", 8), ("S3", 6), ("C3xS3", 18), ("C3xC3", 9), ("S4", 24)] {
            assert_eq!(group(s).order(), n, "{s}");
        }
    }

    #[test]
    fn c3xs3_presentation() {
        let g = group("C3xS3");
        assert_eq!(g.generator_names(), ["x", "y", "z"]);
        let [x, y, z] = [0, 1, 2].map(|i| g.generator_indices()[i]);
        assert_eq!(g.element_order(x), 3);
        assert_eq!(g.element_order(y), 3);
        assert_eq!(g.element_order(z), 2);
        assert_eq!(g.mul(x, y), g.mul(y, x));
        assert_eq!(g.mul(x, z), g.mul(z, x));
        // zy = y^2 z
        assert_eq!(g.mul(z, y), g.mul(g.mul(y, y), z));
    }

    #[test]
    fn quaternion_structure() {
        let g = group("Q8");
        // unique involution
        let involutions = (1..8).filter(|&i| g.element_order(i) == 2).count();
        assert_eq!(involutions, 1);
        assert_eq!((1..8).filter(|&i| g.element_order(i) == 4).count(), 6);
    }

    #[test]
    fn bound_enforced() {
        let p: GroupPreset = "S5".parse().unwrap();
        assert!(matches!(GroupData::from_preset_bounded(&p, 100), Err(GroupError::GroupTooLarge { .. })));
    }

    #[test]
    fn table_is_associative_and_words_evaluate() {
        let g = group("A4");
        let n = g.order();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
            let w: Vec<(usize, i64)> = g.word(a).iter().map(|&s| (s, 1)).collect();
            assert_eq!(g.eval_word(&w), a);
            assert_eq!(g.mul(a, g.inverse(a)), 0);
        }
    }

    #[test]
    fn word_parsing() {
        let g = group("C3xS3");
        let w = g.parse_word("x^3").unwrap();
        assert_eq!(g.eval_word(&w), 0);
        let xz = g.parse_word("xz").unwrap();
        assert_eq!(xz, vec![(0, 1), (2, 1)]);
        let yinv = g.parse_word("y^-1").unwrap();
        assert_eq!(g.eval_word(&yinv), g.inverse(g.generator_indices()[1]));
        assert!(g.parse_word("q").is_err());
    }
}
