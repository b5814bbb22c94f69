/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

#include <qisim/analytics.hpp>
#include <qisim/channel.hpp>
#include <qisim/config_io.hpp>
#include <qisim/correlator.hpp>
#include <qisim/error.hpp>
#include <qisim/imaging.hpp>
#include <qisim/model.hpp>
#include <qisim/parallel.hpp>
#include <qisim/pgm.hpp>
#include <qisim/random.hpp>
#include <qisim/source.hpp>
#include <qisim/sweep.hpp>
#include <qisim/tag_io.hpp>
