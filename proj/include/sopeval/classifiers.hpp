#pragma once

#include "sopeval/classifiers/forest.hpp"
#include "sopeval/classifiers/labeled.hpp"
#include "sopeval/classifiers/logistic.hpp"
#include "sopeval/classifiers/model.hpp"
#include "sopeval/classifiers/net.hpp"
#include "sopeval/classifiers/svm.hpp"
