use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::ff::{Field, FieldSpec, Matrix};
use crate::group::{GroupData, GroupDescriptor, Module};

/// A matrix entry: an integer for prime fields, a coefficient list over the
/// prime field otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Coeffs(Vec<u32>),
}

/// On-disk form of a module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleFile {
    pub field: FieldSpec,
    pub group: GroupDescriptor,
    pub dim: usize,
    pub generators: Vec<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

fn parse_error(context: impl Into<String>) -> HarnessError {
    HarnessError::Parse { context: context.into() }
}

impl ModuleFile {
    pub fn from_module(m: &Module, label: Option<String>) -> ModuleFile {
        let f = m.field();
        let entry = |v: u8| {
            if f.degree() == 1 {
                Entry::Int(v as i64)
            } else {
                Entry::Coeffs(f.coeffs(v))
            }
        };
        let generators = m
            .gens()
            .iter()
            .map(|g| (0..g.rows()).map(|r| g.row(r).iter().map(|&v| entry(v)).collect()).collect())
            .collect();
        ModuleFile {
            field: f.spec().clone(),
            group: m.group().descriptor().clone(),
            dim: m.dim(),
            generators,
            label,
        }
    }

    pub fn field(&self) -> Result<Field, HarnessError> {
        let spec = FieldSpec::with_modulus(self.field.p, self.field.modulus.clone())
            .map_err(|e| parse_error(format!("field: {e}")))?;
        if spec.n != self.field.n {
            return Err(parse_error(format!(
                "field: degree {} does not match a modulus of degree {}",
                self.field.n, spec.n
            )));
        }
        Ok(Field::new(spec))
    }

    pub fn group(&self) -> Result<Arc<GroupData>, HarnessError> {
        GroupData::from_descriptor(&self.group)
            .map(Arc::new)
            .map_err(|e| parse_error(format!("group: {e}")))
    }

    /// Validate and build the module over a freshly enumerated group.
    pub fn to_module(&self) -> Result<Module, HarnessError> {
        self.to_module_over(&self.group()?)
    }

    /// Build the module over an existing group, which must match the file's.
    pub fn to_module_over(&self, group: &Arc<GroupData>) -> Result<Module, HarnessError> {
        let field = self.field()?;
        if self.generators.len() != group.num_generators() {
            return Err(parse_error(format!(
                "generators: {} matrices for {} group generators",
                self.generators.len(),
                group.num_generators()
            )));
        }
        let mut gens = Vec::with_capacity(self.generators.len());
        for (i, rows) in self.generators.iter().enumerate() {
            if rows.len() != self.dim {
                return Err(parse_error(format!("generators[{i}]: {} rows, expected {}", rows.len(), self.dim)));
            }
            let mut data = Vec::with_capacity(self.dim * self.dim);
            for (r, row) in rows.iter().enumerate() {
                if row.len() != self.dim {
                    return Err(parse_error(format!(
                        "generators[{i}][{r}]: {} entries, expected {}",
                        row.len(),
                        self.dim
                    )));
                }
                for (c, e) in row.iter().enumerate() {
                    let v = match e {
                        Entry::Int(v) => field.from_int(*v),
                        Entry::Coeffs(cs) => field
                            .from_coeffs(cs)
                            .map_err(|err| parse_error(format!("generators[{i}][{r}][{c}]: {err}")))?,
                    };
                    data.push(v);
                }
            }
            gens.push(Matrix::from_data(&field, self.dim, self.dim, data));
        }
        Ok(Module::new(group, &field, gens)?)
    }

    pub fn from_json(text: &str) -> Result<ModuleFile, HarnessError> {
        serde_json::from_str(text).map_err(|e| parse_error(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("module files always serialize")
    }

    pub fn read(path: &Path) -> Result<ModuleFile, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            HarnessError::Parse { context } => parse_error(format!("{}: {context}", path.display())),
            other => other,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
    }
}
