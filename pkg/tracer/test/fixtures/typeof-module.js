module.exports = function shout(text) {
  if (typeof text !== "string") {
    throw new TypeError("shout expects a string.");
  }
  return text.toUpperCase() + "!";
};
