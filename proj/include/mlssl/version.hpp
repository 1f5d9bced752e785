#pragma once

#define MLSSL_VERSION "0.1.0"
