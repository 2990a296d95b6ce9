//! Architecture strategies and their name-keyed registry.
//!
//! Each BD-RIS architecture is a [`ScatteringDesigner`]. Callers pick one at
//! runtime through [`DesignerRegistry`] using a short name such as
//! `"single"`, `"fully"` or `"group:4"`.

use std::collections::BTreeMap;
use std::fmt;

use crate::baselines::single_connected_design;
use crate::synth::{synthesize_group, upper_bounds, ScatteringMatrix, SisoLink};
use crate::{Error, Result};

/// Produces the optimal scattering matrix of one architecture for a SISO link.
pub trait ScatteringDesigner: Send + Sync + fmt::Debug {
    /// Registry name, including the group size for group connected designs.
    fn name(&self) -> String;

    /// Group size used on a surface with `n_ris` elements.
    fn group_size(&self, n_ris: usize) -> Result<usize>;

    /// Optimal `Θ` including the common rotation onto the direct link.
    fn design(&self, link: &SisoLink) -> Result<ScatteringMatrix>;

    /// Received-power upper bound for this architecture.
    fn bound(&self, link: &SisoLink, tx_power: f64) -> Result<f64> {
        let ng = self.group_size(link.n_ris())?;
        Ok(upper_bounds(link, ng, tx_power)?.group)
    }
}

/// Diagonal phase shifts.
#[derive(Debug, Clone, Copy, Default)]
pub struct SingleConnected;

impl ScatteringDesigner for SingleConnected {
    fn name(&self) -> String {
        "single".into()
    }

    fn group_size(&self, _n_ris: usize) -> Result<usize> {
        Ok(1)
    }

    fn design(&self, link: &SisoLink) -> Result<ScatteringMatrix> {
        match single_connected_design(link, 1.0) {
            Ok(d) => Ok(d.theta),
            // A vanishing surface channel makes every diagonal equally good.
            Err(Error::Degenerate(_)) => synthesize_group(link, 1),
            Err(e) => Err(e),
        }
    }
}

/// Block-diagonal surface with groups of `group_size` elements.
#[derive(Debug, Clone, Copy)]
pub struct GroupConnected {
    pub group_size: usize,
}

impl ScatteringDesigner for GroupConnected {
    fn name(&self) -> String {
        format!("group:{}", self.group_size)
    }

    fn group_size(&self, n_ris: usize) -> Result<usize> {
        if self.group_size == 0 || n_ris % self.group_size != 0 {
            return Err(Error::DimensionMismatch(format!(
                "group size {} does not divide {n_ris} elements",
                self.group_size
            )));
        }
        Ok(self.group_size)
    }

    fn design(&self, link: &SisoLink) -> Result<ScatteringMatrix> {
        synthesize_group(link, self.group_size(link.n_ris())?)
    }
}

/// One group spanning the whole surface.
#[derive(Debug, Clone, Copy, Default)]
pub struct FullyConnected;

impl ScatteringDesigner for FullyConnected {
    fn name(&self) -> String {
        "fully".into()
    }

    fn group_size(&self, n_ris: usize) -> Result<usize> {
        Ok(n_ris)
    }

    fn design(&self, link: &SisoLink) -> Result<ScatteringMatrix> {
        synthesize_group(link, link.n_ris())
    }
}

/// Designer matching a group size on a surface of `n_ris` elements:
/// single connected for 1, fully connected for `n_ris`, group otherwise.
pub fn for_group_size(group_size: usize, n_ris: usize) -> Box<dyn ScatteringDesigner> {
    if group_size == 1 {
        Box::new(SingleConnected)
    } else if group_size == n_ris {
        Box::new(FullyConnected)
    } else {
        Box::new(GroupConnected { group_size })
    }
}

type Factory = fn(Option<usize>) -> Result<Box<dyn ScatteringDesigner>>;

/// Name to constructor map.
pub struct DesignerRegistry {
    factories: BTreeMap<&'static str, Factory>,
}

impl fmt::Debug for DesignerRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}

impl Default for DesignerRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register("single", |_| Ok(Box::new(SingleConnected)));
        r.register("fully", |_| Ok(Box::new(FullyConnected)));
        r.register("group", |size| {
            let group_size = size.ok_or_else(|| {
                Error::InvalidInput("group architecture needs a size, e.g. group:4".into())
            })?;
            if group_size == 0 {
                return Err(Error::InvalidInput("group size must be positive".into()));
            }
            Ok(Box::new(GroupConnected { group_size }))
        });
        r
    }
}

impl DesignerRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    /// Adds or replaces a strategy.
    pub fn register(&mut self, name: &'static str, factory: Factory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    /// Looks up `name` or `name:size`.
    pub fn create(&self, spec: &str) -> Result<Box<dyn ScatteringDesigner>> {
        let spec = spec.trim();
        let (name, size) = match spec.split_once(':') {
            Some((n, s)) => {
                let size = s
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("bad size in architecture '{spec}'")))?;
                (n.trim(), Some(size))
            }
            None => (spec, None),
        };
        let factory = self.factories.get(name).ok_or_else(|| {
            let known: Vec<_> = self.names().collect();
            Error::InvalidInput(format!(
                "unknown architecture '{name}' (known: {})",
                known.join(", ")
            ))
        })?;
        factory(size)
    }
}
