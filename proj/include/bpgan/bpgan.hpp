// Copyright 2026 The BPGAN Codec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Umbrella header pulling in the whole library.

#include "bpgan/autodiff.hpp"
#include "bpgan/bitio.hpp"
#include "bpgan/bytes.hpp"
#include "bpgan/codebook.hpp"
#include "bpgan/codec.hpp"
#include "bpgan/container.hpp"
#include "bpgan/dsp.hpp"
#include "bpgan/error.hpp"
#include "bpgan/huffman.hpp"
#include "bpgan/image_io.hpp"
#include "bpgan/layers.hpp"
#include "bpgan/mel.hpp"
#include "bpgan/metrics.hpp"
#include "bpgan/model.hpp"
#include "bpgan/model_io.hpp"
#include "bpgan/msssim.hpp"
#include "bpgan/objectives.hpp"
#include "bpgan/pipeline.hpp"
#include "bpgan/rng.hpp"
#include "bpgan/search.hpp"
#include "bpgan/synthetic.hpp"
#include "bpgan/tensor.hpp"
#include "bpgan/wav_io.hpp"
