#pragma once
// Flat key=value run configuration ('#' comments, one key per line, dotted
// prefixes per module). Unknown keys are rejected.

#include <string>

#include "shadow/baseline.hpp"
#include "shadow/loss.hpp"
#include "shadow/segment.hpp"
#include "shadow/synth.hpp"
#include "shadow/train.hpp"
#include "shadow/unet.hpp"

namespace shadow {

struct RunConfig {
    synth::SynthConfig synth;
    UNetConfig unet{3, 16};
    TrainConfig train;
    LossConfig loss;
    segment::SegmentConfig segment;
    baseline::BaselineConfig baseline;
    double eval_size_bin_width = 1.0;

    void validate() const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

/// Documented list of every accepted key with its default, one per line.
std::string config_reference();

}  // namespace shadow
