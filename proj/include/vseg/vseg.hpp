#pragma once

// Everything in one include.

#include "vseg/coarse_fusion.hpp"
#include "vseg/color.hpp"
#include "vseg/config.hpp"
#include "vseg/debug_export.hpp"
#include "vseg/error.hpp"
#include "vseg/eval.hpp"
#include "vseg/fine_seg.hpp"
#include "vseg/frame_volume.hpp"
#include "vseg/gmm.hpp"
#include "vseg/image.hpp"
#include "vseg/image_file.hpp"
#include "vseg/kmeans.hpp"
#include "vseg/maxflow.hpp"
#include "vseg/media_io.hpp"
#include "vseg/motion_cluster.hpp"
#include "vseg/parallel.hpp"
#include "vseg/pipeline.hpp"
#include "vseg/preprocess.hpp"
#include "vseg/supervoxel.hpp"
#include "vseg/synthetic.hpp"
#include "vseg/tracker.hpp"
