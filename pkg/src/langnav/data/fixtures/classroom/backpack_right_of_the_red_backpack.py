def execute_command(image):
    image_patch = ImagePatch(image)
    backpack_patches = image_patch.find('backpack')
    red_patches = []
    for patch in backpack_patches:
        if patch.verify_property('backpack', 'red'):
            red_patches.append(patch)
    if len(red_patches) == 0:
        return {'function': 'None', 'error': 'No red backpack found.'}
    reference = red_patches[0]
    right_backpacks = []
    for patch in backpack_patches:
        if patch.horizontal_center > reference.horizontal_center:
            right_backpacks.append(patch)
    if len(right_backpacks) == 0:
        return {'function': 'None', 'error': 'No backpack right of the red one.'}
    right_backpacks.sort(key=lambda x: x.horizontal_center)
    target = right_backpacks[0]
    inputs = (target.horizontal_center, target.vertical_center)
    return {'function': 'navigate_to_object', 'inputs': inputs, 'box': [target.left, target.lower, target.right, target.upper]}
