#ifndef REGSEQ_REGSEQ_HPP
#define REGSEQ_REGSEQ_HPP

#include "regseq/dyadic.hpp"
#include "regseq/errors.hpp"
#include "regseq/funclib.hpp"
#include "regseq/funcspec.hpp"
#include "regseq/ntcore.hpp"
#include "regseq/numeric.hpp"
#include "regseq/scanner.hpp"
#include "regseq/seeker.hpp"
#include "regseq/verifier.hpp"

#endif  // REGSEQ_REGSEQ_HPP
