//! Configs shipped with the binary.

pub const BUNDLED: &[(&str, &str)] = &[
    ("example1_cooling", include_str!("../configs/example1_cooling.cfg")),
    ("example1b_dephasing", include_str!("../configs/example1b_dephasing.cfg")),
    ("example1b_dephasing_02", include_str!("../configs/example1b_dephasing_02.cfg")),
    ("example2_erasure", include_str!("../configs/example2_erasure.cfg")),
    ("example3_random_pairs", include_str!("../configs/example3_random_pairs.cfg")),
    ("example4_bitflip_pairs", include_str!("../configs/example4_bitflip_pairs.cfg")),
    ("example5_ghz_iontrap", include_str!("../configs/example5_ghz_iontrap.cfg")),
    ("gmon_init", include_str!("../configs/gmon_init.cfg")),
    ("gmon_ghz", include_str!("../configs/gmon_ghz.cfg")),
    ("gmon_ppt", include_str!("../configs/gmon_ppt.cfg")),
    ("gmon_erase", include_str!("../configs/gmon_erase.cfg")),
    ("hlp_vs_greedy", include_str!("../configs/hlp_vs_greedy.cfg")),
    ("algcool_test1", include_str!("../configs/algcool_test1.cfg")),
    ("algcool_test2", include_str!("../configs/algcool_test2.cfg")),
    ("gmon_timescales", include_str!("../configs/gmon_timescales.cfg")),
];

pub fn find(name: &str) -> Option<(&'static str, &'static str)> {
    let name = name.strip_prefix("bundled:").unwrap_or(name);
    let name = name.strip_suffix(".cfg").unwrap_or(name);
    BUNDLED.iter().copied().find(|(n, _)| *n == name)
}
