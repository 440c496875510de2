#pragma once

#define MEDMEDIATE_VERSION "0.1.0"
