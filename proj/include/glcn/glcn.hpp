#pragma once

#include "glcn/checkpoint.hpp"
#include "glcn/data.hpp"
#include "glcn/errors.hpp"
#include "glcn/gconv.hpp"
#include "glcn/graph_learning.hpp"
#include "glcn/matrix.hpp"
#include "glcn/model.hpp"
#include "glcn/ops.hpp"
#include "glcn/optim.hpp"
#include "glcn/runner.hpp"
#include "glcn/tape.hpp"
#include "glcn/train.hpp"
