exports.each = function each(items, fn) {
  for (var i = 0; i < items.length; i++) {
    fn(items[i]);
  }
};

exports.register = function register(handler) {
  return typeof handler === "function";
};
