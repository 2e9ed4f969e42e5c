"""Simulator and analysis toolkit for multi-photon interference in a
time-bin loop interferometer.

The heavy lifting lives in the compiled extension ``loopsim._core``; this
package re-exports its public surface.
"""

from loopsim._core import (  # noqa: F401
    CorrelationHistogram,
    Chi2Result,
    EventCounts,
    ExperimentSpec,
    KMeansResult,
    Parity,
    PhotonDistribution,
    PhotonModel,
    ReflectivitySchedule,
    RunConfig,
    SequenceRecord,
    SourceModel,
    StreamOrigin,
    Subspace,
    TagStream,
    TimeTag,
    ValidationReport,
    beamsplitter_block,
    bin_tags,
    chi2_two_sample,
    cmd_compile,
    cmd_fidelity,
    cmd_hom,
    cmd_preview,
    cmd_reconstruct,
    cmd_report,
    cmd_simulate,
    cmd_validate,
    collision_free_outcomes,
    compile_network,
    draw_outcomes,
    estimate_rates,
    extract_events,
    full_outcomes,
    hom_bin_state,
    hom_histogram,
    kmeans_cluster,
    load_config,
    mix_distinguishability,
    outcome_probability,
    outcome_probability_distinguishable,
    output_distribution,
    permanent,
    preview_intensity,
    read_tag_stream,
    read_tag_stream_csv,
    regularized_gamma_q,
    rne_counter,
    rne_threshold,
    rne_value,
    sample_patterns,
    standard_experiment,
    statistical_fidelity,
    staircase_reflectivities,
    synthesize_stream,
    validate_distinguishable,
    visibility,
    write_tag_stream,
    write_tag_stream_csv,
)

__version__ = "0.1.0"
