//! Shipped sweep recipes behind the `figure` shorthand. The same TOML files
//! live under `configs/` for editing and direct use with `sweep`.

use crate::config::SweepFile;
use crate::sweep::{run_sweep, SweepOutcome};
use std::path::Path;

pub struct FigureRecipe {
    pub name: &'static str,
    pub panels: &'static [(&'static str, &'static str)],
}

pub const FIGURES: &[FigureRecipe] = &[
    FigureRecipe {
        name: "fig2",
        panels: &[("fig2", include_str!("../configs/fig2.toml"))],
    },
    FigureRecipe {
        name: "fig3",
        panels: &[("fig3", include_str!("../configs/fig3.toml"))],
    },
    FigureRecipe {
        name: "fig4",
        panels: &[
            ("fig4a", include_str!("../configs/fig4a.toml")),
            ("fig4b", include_str!("../configs/fig4b.toml")),
            ("fig4c", include_str!("../configs/fig4c.toml")),
        ],
    },
    FigureRecipe {
        name: "fig5",
        panels: &[
            ("fig5a", include_str!("../configs/fig5a.toml")),
            ("fig5b", include_str!("../configs/fig5b.toml")),
            ("fig5c", include_str!("../configs/fig5c.toml")),
            ("fig5d", include_str!("../configs/fig5d.toml")),
        ],
    },
];

pub fn recipe(name: &str) -> Option<&'static FigureRecipe> {
    FIGURES.iter().find(|f| f.name == name)
}

/// Run every panel of a figure recipe into `out_dir`.
pub fn run_figure(
    name: &str,
    out_dir: &Path,
    jobs: usize,
    tol_override: Option<f64>,
) -> Result<Vec<SweepOutcome>, String> {
    let recipe = recipe(name).ok_or_else(|| {
        format!(
            "unknown figure {name}; available: {}",
            FIGURES.iter().map(|f| f.name).collect::<Vec<_>>().join(", ")
        )
    })?;
    let mut outcomes = Vec::new();
    for (panel, text) in recipe.panels {
        let file = SweepFile::parse(text)?;
        let mut resolved = file.resolve()?;
        resolved.out_dir = out_dir.to_path_buf();
        resolved.prefix = panel.to_string();
        if let Some(tol) = tol_override {
            resolved.tol = tol;
        }
        outcomes.push(run_sweep(&resolved, jobs, text)?);
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_shipped_recipe_parses_and_resolves() {
        for figure in FIGURES {
            for (panel, text) in figure.panels {
                let file = SweepFile::parse(text).unwrap_or_else(|e| panic!("{panel}: {e}"));
                file.resolve().unwrap_or_else(|e| panic!("{panel}: {e}"));
            }
        }
    }
}
