// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors
#pragma once

#define COBEAM_VERSION_MAJOR 0
#define COBEAM_VERSION_MINOR 1
#define COBEAM_VERSION_PATCH 0
#define COBEAM_VERSION_STRING "0.1.0"
