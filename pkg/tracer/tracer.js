#!/usr/bin/env node
/*
 * Runs one example script against a module and records how the module's
 * functions are used: invocations with run-time argument/return types, and
 * per-argument interactions (field reads, method calls, callback calls).
 * The result is written as trace JSON (schema version 1).
 *
 * Usage:  node tracer.js <example.js> <moduleName> <out.json>
 *
 * The example's require of <moduleName> (by bare name or by a path whose
 * basename matches) is intercepted and its exports are wrapped in proxies.
 * Primitive values are never wrapped, so typeof checks and string/number
 * operations behave natively inside the library.  If the environment
 * variable DTSGEN_MODULE_PATH is set, the intercepted require loads the
 * module from that path instead (used for recorded package fixtures).
 *
 * If the example throws, the process exits non-zero and no trace is
 * written.
 */

"use strict";

const fs = require("fs");
const path = require("path");
const Module = require("module");

const MAX_NESTING = 32;

const [examplePath, moduleName, outPath] = process.argv.slice(2);
if (!examplePath || !moduleName || !outPath) {
  console.error("usage: node tracer.js <example.js> <moduleName> <out.json>");
  process.exit(2);
}

// ---------------------------------------------------------------------------
// trace state

const trace = { schemaVersion: 1, functions: {} };
let nextFunctionId = 1;

const functionIds = new WeakMap(); // raw function -> "functionId_N"
const proxyToRaw = new WeakMap(); // any proxy or recorder we made -> raw value
const tracedFunctionProxies = new WeakMap(); // raw function -> its traced proxy
const libraryProxies = new WeakMap(); // raw object -> its pass-out proxy
const callbackWrappers = new WeakMap(); // raw callback -> its pass-in proxy
const argumentBindings = new WeakMap(); // raw callback -> interactions list of its first binding
const recordingCaches = new WeakMap(); // interactions list -> WeakMap(raw -> proxy)
const methodRecorders = new WeakMap(); // interactions list -> Map(raw fn -> recorder)

function raw(value) {
  const unwrapped = proxyToRaw.get(value);
  return unwrapped === undefined ? value : unwrapped;
}

function isWrappable(value) {
  return value !== null && (typeof value === "object" || typeof value === "function");
}

function runtimeTypeOf(value) {
  const v = raw(value);
  if (v === null) return "null";
  const t = typeof v;
  if (
    t === "undefined" ||
    t === "string" ||
    t === "number" ||
    t === "boolean" ||
    t === "function"
  ) {
    return t;
  }
  if (t !== "object") {
    // symbol / bigint: the schema has no own kind for these
    return { kind: "object", constructorName: t === "bigint" ? "BigInt" : "Symbol" };
  }
  if (Array.isArray(v)) return "array";
  const ctor = v.constructor && v.constructor.name ? v.constructor.name : "Object";
  return { kind: "object", constructorName: ctor };
}

function parameterNames(fn) {
  let source = "";
  try {
    source = Function.prototype.toString.call(fn);
  } catch {
    return [];
  }
  source = source.replace(/\/\*[^]*?\*\//g, "").replace(/\/\/[^\n]*/g, "");
  const parens = /^[^(]*\(([^)]*)\)/.exec(source);
  if (!parens) {
    const bare = /^\s*(?:async\s+)?([A-Za-z_$][\w$]*)\s*=>/.exec(source);
    return bare ? [bare[1]] : [];
  }
  return parens[1]
    .split(",")
    .map((part) => part.trim().split(/[=\s.[{]/)[0])
    .filter(Boolean);
}

function containerFor(fn, meta) {
  const existing = functionIds.get(fn);
  if (existing !== undefined) return trace.functions[existing];
  const id = "functionId_" + nextFunctionId++;
  functionIds.set(fn, id);
  const container = {
    functionName: meta.functionName !== undefined ? meta.functionName : fn.name || "",
    isExported: Boolean(meta.isExported),
    isConstructor: false,
    requiredModule: meta.requiredModule || "",
    args: {},
    invocations: [],
  };
  // bookkeeping kept out of the serialized JSON
  Object.defineProperty(container, "id", { value: id, enumerable: false });
  Object.defineProperty(container, "paramNames", {
    value: parameterNames(fn),
    enumerable: false,
  });
  trace.functions[id] = container;
  return container;
}

function argContainerOf(container, index) {
  const key = String(index);
  if (!container.args[key]) {
    container.args[key] = {
      argumentName: container.paramNames[index] || "arg" + index,
      interactions: [],
    };
  }
  return container.args[key];
}

function pushUnique(interactions, record) {
  const key = JSON.stringify(record);
  for (const existing of interactions) {
    if (JSON.stringify(existing) === key) return;
  }
  interactions.push(record);
}

// ---------------------------------------------------------------------------
// wrapping values the library receives (example -> library)

function wrapArgument(value, interactions, depth) {
  const target = raw(value);
  if (!isWrappable(target)) return target;
  if (typeof target === "function") return wrapCallback(target, interactions);
  return recordingProxy(target, interactions, depth);
}

function recordingProxy(target, interactions, depth) {
  let perTarget = recordingCaches.get(interactions);
  if (!perTarget) {
    perTarget = new WeakMap();
    recordingCaches.set(interactions, perTarget);
  }
  const cached = perTarget.get(target);
  if (cached) return cached;
  const proxy = new Proxy(target, {
    get(t, prop) {
      const result = Reflect.get(t, prop, t);
      if (typeof prop === "symbol") return result;
      if (typeof result === "function") {
        // field reads that produce a function are recorded only when called
        return methodRecorder(t, result, String(prop), interactions, depth);
      }
      const record = {
        code: "getField",
        field: String(prop),
        returnTypeOf: runtimeTypeOf(result),
        followingInteractions: [],
      };
      interactions.push(record);
      if (isWrappable(result) && typeof result === "object" && depth < MAX_NESTING) {
        return recordingProxy(result, record.followingInteractions, depth + 1);
      }
      return result;
    },
  });
  perTarget.set(target, proxy);
  proxyToRaw.set(proxy, target);
  return proxy;
}

function methodRecorder(receiver, fn, name, interactions, depth) {
  let perFn = methodRecorders.get(interactions);
  if (!perFn) {
    perFn = new Map();
    methodRecorders.set(interactions, perFn);
  }
  const cached = perFn.get(fn);
  if (cached) return cached;
  const recorder = function (...args) {
    const record = {
      code: "methodCall",
      methodName: name,
      followingInteractions: [],
    };
    interactions.push(record);
    const result = Reflect.apply(fn, receiver, args.map(raw));
    if (isWrappable(result) && typeof result === "object" && depth < MAX_NESTING) {
      return recordingProxy(result, record.followingInteractions, depth + 1);
    }
    return result;
  };
  perFn.set(fn, recorder);
  proxyToRaw.set(recorder, fn);
  return recorder;
}

function wrapCallback(fn, interactions) {
  if (!argumentBindings.has(fn)) argumentBindings.set(fn, interactions);
  let wrapper = callbackWrappers.get(fn);
  if (wrapper) return wrapper;
  wrapper = new Proxy(fn, {
    apply(t, thisArg, args) {
      const container = containerFor(t, {
        functionName: t.name || "",
        isExported: false,
        requiredModule: "",
      });
      pushUnique(argumentBindings.get(t), {
        code: "methodCall",
        methodName: "",
        functionId: container.id,
        followingInteractions: [],
      });
      // the example's own function: record the call, do not wrap the result
      return invokeTraced(container, t, raw(thisArg), args, false, false);
    },
  });
  callbackWrappers.set(fn, wrapper);
  proxyToRaw.set(wrapper, fn);
  return wrapper;
}

// ---------------------------------------------------------------------------
// wrapping values the library hands out (library -> example)

function wrapLibraryValue(value, requiredModule) {
  const target = raw(value);
  if (!isWrappable(target)) return target;
  if (typeof target === "function") {
    return traceFunction(target, {
      isExported: false,
      requiredModule,
    });
  }
  return libraryProxy(target, requiredModule);
}

function libraryProxy(target, requiredModule) {
  const cached = libraryProxies.get(target);
  if (cached) return cached;
  const proxy = new Proxy(target, {
    get(t, prop) {
      const result = Reflect.get(t, prop, t);
      if (typeof prop === "symbol") return result;
      if (typeof result === "function" && prop !== "constructor") {
        return traceFunction(result, {
          functionName: result.name || String(prop),
          isExported: false,
          requiredModule,
        });
      }
      return result;
    },
    set(t, prop, value) {
      return Reflect.set(t, prop, raw(value), t);
    },
  });
  libraryProxies.set(target, proxy);
  proxyToRaw.set(proxy, target);
  return proxy;
}

function traceFunction(fn, meta) {
  const cached = tracedFunctionProxies.get(fn);
  if (cached) return cached;
  const proxy = new Proxy(fn, {
    apply(t, thisArg, args) {
      const container = containerFor(t, meta);
      return invokeTraced(container, t, raw(thisArg), args, false, true);
    },
    construct(t, args) {
      const container = containerFor(t, meta);
      return invokeTraced(container, t, undefined, args, true, true);
    },
    get(t, prop) {
      const result = Reflect.get(t, prop, t);
      if (typeof prop === "symbol") return result;
      if (
        typeof result === "function" &&
        prop !== "constructor" &&
        prop !== "call" &&
        prop !== "apply" &&
        prop !== "bind"
      ) {
        // functions reachable from an exported one (e.g. statics)
        return traceFunction(result, {
          functionName: result.name || String(prop),
          isExported: false,
          requiredModule: meta.requiredModule,
        });
      }
      return result;
    },
  });
  tracedFunctionProxies.set(fn, proxy);
  proxyToRaw.set(proxy, fn);
  return proxy;
}

function invokeTraced(container, fn, thisArg, args, isConstruct, wrapReturn) {
  if (isConstruct) container.isConstructor = true;
  const invocation = {
    argumentRuntimeTypes: args.map(runtimeTypeOf),
    returnRuntimeType: "undefined",
  };
  container.invocations.push(invocation);
  const wrappedArgs = args.map((arg, index) => {
    const slot = argContainerOf(container, index);
    const rawArg = raw(arg);
    if (
      typeof rawArg === "function" &&
      argumentBindings.has(rawArg) &&
      argumentBindings.get(rawArg) !== slot.interactions
    ) {
      // a callback already bound elsewhere flows into another traced call
      pushUnique(argumentBindings.get(rawArg), {
        code: "usedAsArgument",
        calleeFunctionId: container.id,
      });
    }
    return wrapArgument(rawArg, slot.interactions, 0);
  });
  const result = isConstruct
    ? Reflect.construct(fn, wrappedArgs)
    : Reflect.apply(fn, thisArg, wrappedArgs);
  invocation.returnRuntimeType = runtimeTypeOf(result);
  if (!wrapReturn) return result;
  // methods of returned objects belong to no module of their own
  return wrapLibraryValue(result, "");
}

// ---------------------------------------------------------------------------
// module interception

const moduleWrappers = new WeakMap(); // raw exports -> wrapped exports
const modulePathOverride = process.env.DTSGEN_MODULE_PATH || "";

function isTargetRequest(request) {
  if (request === moduleName) return true;
  const base =
    String(request).replace(/\\/g, "/").split("/").filter(Boolean).pop() || "";
  return base.replace(/\.(js|cjs|mjs|json|node)$/, "") === moduleName;
}

function wrapModuleExports(exportsValue) {
  if (!isWrappable(exportsValue)) return exportsValue;
  if (typeof exportsValue === "function") {
    return traceFunction(exportsValue, {
      functionName: exportsValue.name || "",
      isExported: true,
      requiredModule: moduleName,
    });
  }
  const cached = moduleWrappers.get(exportsValue);
  if (cached) return cached;
  const wrapped = libraryProxy(exportsValue, moduleName);
  moduleWrappers.set(exportsValue, wrapped);
  return wrapped;
}

const originalRequire = Module.prototype.require;
Module.prototype.require = function (request) {
  if (!isTargetRequest(request)) {
    return originalRequire.apply(this, arguments);
  }
  const exportsValue = modulePathOverride
    ? originalRequire.call(this, modulePathOverride)
    : originalRequire.apply(this, arguments);
  return wrapModuleExports(exportsValue);
};

// ---------------------------------------------------------------------------
// run the example and write the trace

let discard = false;

process.on("uncaughtException", (err) => {
  discard = true;
  console.error(err && err.stack ? err.stack : String(err));
  process.exit(1);
});

process.on("exit", (code) => {
  if (discard || code !== 0) return;
  fs.writeFileSync(outPath, JSON.stringify(trace, null, 2) + "\n");
});

require(path.resolve(examplePath));
