from .feature_pipeline import (
    EngineeredDataset,
    FeatureEngineeringPipeline,
    GeneratedFeature,
    PipelineConfig,
    check_compatible,
    dedup_check,
    transform_dataset,
)
