use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub dim: usize,
}

/// Ordered register layout of a composite space.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Register>", into = "Vec<Register>")]
pub struct Layout {
    registers: Vec<Register>,
}

impl Layout {
    pub fn new<I, S>(registers: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let registers = registers
            .into_iter()
            .map(|(name, dim)| Register {
                name: name.into(),
                dim,
            })
            .collect::<Vec<_>>();
        Self::from_registers(registers)
    }

    pub fn from_registers(registers: Vec<Register>) -> Result<Self> {
        for (k, reg) in registers.iter().enumerate() {
            if reg.dim == 0 {
                return Err(Error::Layout(format!("register `{}` has dimension 0", reg.name)));
            }
            if registers[..k].iter().any(|r| r.name == reg.name) {
                return Err(Error::Layout(format!("duplicate register `{}`", reg.name)));
            }
        }
        Ok(Self { registers })
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.registers.iter().map(|r| r.name.as_str())
    }

    pub fn len(&self) -> usize {
        self.registers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    /// Dimension of the composite space (1 for the empty layout).
    pub fn dim(&self) -> usize {
        self.registers.iter().map(|r| r.dim).product()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.registers.iter().any(|r| r.name == name)
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.registers
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| Error::Layout(format!("unknown register `{name}`")))
    }

    pub fn register_dim(&self, name: &str) -> Result<usize> {
        Ok(self.registers[self.position(name)?].dim)
    }

    pub fn concat(&self, other: &Layout) -> Result<Layout> {
        let mut regs = self.registers.clone();
        regs.extend(other.registers.iter().cloned());
        Self::from_registers(regs)
    }

    /// Sub-layout of the named registers, kept in this layout's order.
    pub fn restrict(&self, names: &[&str]) -> Result<Layout> {
        for n in names {
            self.position(n)?;
        }
        let regs = self
            .registers
            .iter()
            .filter(|r| names.contains(&r.name.as_str()))
            .cloned()
            .collect();
        Self::from_registers(regs)
    }

    /// Registers not named in `names`, in layout order.
    pub fn complement(&self, names: &[&str]) -> Result<Layout> {
        for n in names {
            self.position(n)?;
        }
        let regs = self
            .registers
            .iter()
            .filter(|r| !names.contains(&r.name.as_str()))
            .cloned()
            .collect();
        Self::from_registers(regs)
    }

    /// Layout with registers in the given order; `order` must name every
    /// register exactly once.
    pub fn reordered(&self, order: &[&str]) -> Result<Layout> {
        if order.len() != self.registers.len() {
            return Err(Error::Layout(format!(
                "reorder lists {} registers, layout has {}",
                order.len(),
                self.registers.len()
            )));
        }
        let regs = order
            .iter()
            .map(|n| self.position(n).map(|p| self.registers[p].clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_registers(regs)
    }

    /// Per-register digits of a composite index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.registers.len()];
        for (k, reg) in self.registers.iter().enumerate().rev() {
            out[k] = index % reg.dim;
            index /= reg.dim;
        }
        out
    }

    /// Composite index of per-register digits.
    pub fn index(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.registers.len() {
            return Err(Error::Layout(format!(
                "expected {} digits, got {}",
                self.registers.len(),
                digits.len()
            )));
        }
        let mut index = 0;
        for (d, reg) in digits.iter().zip(&self.registers) {
            if *d >= reg.dim {
                return Err(Error::Layout(format!(
                    "digit {d} out of range for register `{}` (dim {})",
                    reg.name, reg.dim
                )));
            }
            index = index * reg.dim + d;
        }
        Ok(index)
    }

    /// For every index of this layout, the index of the same basis state in
    /// `target`, which must hold the same registers in another order.
    pub(crate) fn index_map(&self, target: &Layout) -> Result<Vec<usize>> {
        let positions = target
            .names()
            .map(|n| self.position(n))
            .collect::<Result<Vec<_>>>()?;
        if positions.len() != self.len() {
            return Err(Error::Layout("layouts hold different registers".into()));
        }
        let mut map = Vec::with_capacity(self.dim());
        let mut reordered = vec![0; positions.len()];
        for idx in 0..self.dim() {
            let digits = self.digits(idx);
            for (slot, &p) in reordered.iter_mut().zip(&positions) {
                *slot = digits[p];
            }
            map.push(target.index(&reordered)?);
        }
        Ok(map)
    }
}

impl TryFrom<Vec<Register>> for Layout {
    type Error = Error;

    fn try_from(registers: Vec<Register>) -> Result<Self> {
        Self::from_registers(registers)
    }
}

impl From<Layout> for Vec<Register> {
    fn from(layout: Layout) -> Self {
        layout.registers
    }
}
