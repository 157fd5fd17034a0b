#pragma once

#include "tweetml/archive.hpp"
#include "tweetml/corpus.hpp"
#include "tweetml/error.hpp"
#include "tweetml/eval.hpp"
#include "tweetml/experiment.hpp"
#include "tweetml/features.hpp"
#include "tweetml/fixtures.hpp"
#include "tweetml/knn.hpp"
#include "tweetml/label_powerset.hpp"
#include "tweetml/labels.hpp"
#include "tweetml/linear_svm.hpp"
#include "tweetml/postprocess.hpp"
#include "tweetml/rakel.hpp"
#include "tweetml/random.hpp"
#include "tweetml/sparse.hpp"
#include "tweetml/synthetic.hpp"
#include "tweetml/tokenize.hpp"
