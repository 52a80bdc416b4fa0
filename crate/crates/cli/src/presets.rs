//! Named configurations, one per reproducible figure panel, at desk scale.

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    /// Rough wall time on a single core.
    pub runtime: &'static str,
    pub config: &'static str,
}

/// Twenty fields from 0.05 to 1.
macro_rules! fields_line {
    () => {
        "fields = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 1.0]\n"
    };
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1a",
        description: "all-to-all squeezing dynamics at Omega = 0.1 J (exact)",
        runtime: "seconds",
        config: "engine = \"collective\"\nsizes = [100, 400, 1600]\nfields = [0.1]\nt_max = 20.0\nt_points = 401\n",
    },
    Preset {
        name: "fig1b",
        description: "optimal squeezing vs N, all-to-all, several fields (exact; nu fits)",
        runtime: "under a minute",
        config: "engine = \"scaling\"\nsource = \"collective\"\nsizes = [64, 128, 256, 512, 1024]\nfields = [0.1, 0.2, 0.5, 0.8]\nt_max = 25.0\nt_points = 1001\n",
    },
    Preset {
        name: "fig1c",
        description: "time to optimal squeezing vs N, all-to-all (exact; log-N fits)",
        runtime: "under a minute",
        config: "engine = \"scaling\"\nsource = \"collective\"\nsizes = [64, 128, 256, 512, 1024]\nfields = [0.1, 0.2, 0.5, 0.8]\nt_max = 25.0\nt_points = 2001\n",
    },
    Preset {
        name: "fig1d",
        description: "all-to-all magnetization dynamics at Omega = 0.1 J (exact)",
        runtime: "seconds",
        config: "engine = \"collective\"\nsizes = [100, 400, 1600]\nfields = [0.1]\nt_max = 40.0\nt_points = 801\n",
    },
    Preset {
        name: "fig2a",
        description: "dipolar 2D magnetization at Omega = 0.2 J (dTWA, L <= 16)",
        runtime: "2-3 minutes",
        config: "engine = \"dtwa\"\ndimension = 2\nalpha = 3.0\nsizes = [8, 12, 16]\nfields = [0.2]\nt_max = 4.0\nt_points = 161\ntrajectories = 500\n",
    },
    Preset {
        name: "fig2b",
        description: "dipolar 2D squeezing at Omega = 0.2 J, dTWA vs rotor/spin-wave theory (L = 16)",
        runtime: "2 minutes",
        config: "engine = \"dtwa\"\ncompare = [\"rsw\"]\ndimension = 2\nalpha = 3.0\nsizes = [16]\nfields = [0.2]\nt_max = 2.0\nt_points = 201\ntrajectories = 1000\n",
    },
    Preset {
        name: "fig2c",
        description: "dipolar optimal squeezing vs N for several fields (dTWA, L <= 14)",
        runtime: "5-10 minutes",
        config: "engine = \"scaling\"\nsource = \"dtwa\"\ndimension = 2\nalpha = 3.0\nsizes = [6, 8, 10, 12, 14]\nfields = [0.1, 0.2, 0.4, 0.6]\nt_max = 2.5\nt_points = 251\ntrajectories = 400\n",
    },
    Preset {
        name: "fig3a",
        description: "spin-wave stability diagram, alpha = 3, D = 2",
        runtime: "seconds",
        config: concat!("engine = \"stability\"\ndimension = 2\nalpha = 3.0\nsizes = [8, 16, 32, 64, 128]\n", fields_line!()),
    },
    Preset {
        name: "fig3b",
        description: "spin-wave stability diagram, alpha = 1 (Coulomb), D = 1",
        runtime: "seconds",
        config: concat!("engine = \"stability\"\ndimension = 1\nalpha = 1.0\nsizes = [16, 32, 64, 128, 256, 512, 1024, 2048, 4096]\n", fields_line!()),
    },
    Preset {
        name: "fig3c",
        description: "spin-wave stability diagram, alpha = 0.5, D = 1",
        runtime: "seconds",
        config: concat!("engine = \"stability\"\ndimension = 1\nalpha = 0.5\nsizes = [16, 32, 64, 128, 256, 512, 1024, 2048, 4096]\n", fields_line!()),
    },
    Preset {
        name: "fig4a",
        description: "squeezed and anti-squeezed variances, all-to-all, exact vs bosonic model",
        runtime: "seconds",
        config: "engine = \"collective\"\ncompare = [\"bosonic\"]\nsizes = [1000]\nfields = [0.1, 0.5]\nt_max = 10.0\nt_points = 401\n",
    },
    Preset {
        name: "fig4b",
        description: "Var(Jy) dynamics, all-to-all, Omega = 0.1 J (exact)",
        runtime: "seconds",
        config: "engine = \"collective\"\nsizes = [100, 400, 1600]\nfields = [0.1]\nt_max = 80.0\nt_points = 1601\n",
    },
    Preset {
        name: "fig4c",
        description: "peak Var(Jy) vs N, all-to-all (exact; Heisenberg-scaling fits)",
        runtime: "about a minute",
        config: "engine = \"scaling\"\nsource = \"collective\"\nsizes = [64, 128, 256, 512, 1024]\nfields = [0.0, 0.1, 0.2, 0.5, 0.8]\nt_max = 80.0\nt_points = 4001\n",
    },
    Preset {
        name: "fig5a",
        description: "dipolar Var(Jy) dynamics at Omega = 0.2 J and OAT, dTWA vs rotor/spin-wave theory",
        runtime: "3-5 minutes",
        config: "engine = \"dtwa\"\ncompare = [\"rsw\"]\ndimension = 2\nalpha = 3.0\nsizes = [8, 12, 16]\nfields = [0.0, 0.2]\nt_max = 4.0\nt_points = 161\ntrajectories = 500\n",
    },
    Preset {
        name: "fig6",
        description: "spreading of C^yy(d, t) at Omega = 0.2 J, L = 16 (dTWA vs rotor/spin-wave theory)",
        runtime: "2 minutes",
        config: "engine = \"dtwa\"\ncompare = [\"rsw\"]\ndimension = 2\nalpha = 3.0\nsizes = [16]\nfields = [0.2]\nt_max = 2.0\nt_points = 101\ntrajectories = 1000\ncorrelation_times = [0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0]\n",
    },
    Preset {
        name: "fig7",
        description: "all-to-all squeezing, exact vs linearised bosonic model, five fields",
        runtime: "seconds",
        config: "engine = \"bosonic\"\ncompare = [\"collective\"]\nsizes = [512]\nfields = [0.1, 0.3, 0.5, 0.7, 0.9]\nt_max = 8.0\nt_points = 321\n",
    },
    Preset {
        name: "fig8",
        description: "dipolar magnetization at large fields 0.6 J and 0.8 J (dTWA, L <= 20)",
        runtime: "5-8 minutes",
        config: "engine = \"dtwa\"\ndimension = 2\nalpha = 3.0\nsizes = [12, 16, 20]\nfields = [0.6, 0.8]\nt_max = 6.0\nt_points = 241\ntrajectories = 500\n",
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    #[test]
    fn every_preset_is_a_valid_config() {
        for p in PRESETS {
            ExperimentConfig::parse(p.config, false).unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
    }

    #[test]
    fn covers_every_panel() {
        let expected = [
            "fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig4a",
            "fig4b", "fig4c", "fig5a", "fig6", "fig7", "fig8",
        ];
        assert_eq!(names(), expected);
    }

    #[test]
    fn stability_preset_spans_the_diagram() {
        let c = ExperimentConfig::parse(find("fig3a").unwrap().config, false).unwrap();
        assert_eq!((c.dimension, c.alpha), (2, 3.0));
        assert_eq!(c.fields.first(), Some(&0.05));
        assert_eq!(c.fields.last(), Some(&1.0));
        assert_eq!((c.sizes[0], *c.sizes.last().unwrap()), (8, 128));
    }
}
